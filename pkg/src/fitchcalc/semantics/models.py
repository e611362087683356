"""The built-in models: Identity, Chain(N), ConstantComonad(N).

Each provides the endofunctor pair dia -| box on the staged-set base
category, the adjunction transposes, and whatever extra structure its
modes need: a monad structure with invertible multiplication for IS4
(ConstantComonad, Identity) or a point r : Id -> box preserved by box
for IR (Chain, Identity).
"""

from __future__ import annotations

from ..syntax import Mode, Ty
from ..surface import ModelDecl
from .core import Mor, Obj, ShapeMismatch, identity, terminal


class ModeUnsupported(Exception):
    pass


class UnknownBaseType(Exception):
    pass


class Model:
    """Base-category structure shared by all models; subclasses add the
    modal part."""

    kind = "abstract"

    def __init__(self, stages: int, bases: dict[str, Obj]):
        self.stages = stages  # number of transitions; stage count is stages+1
        self.n_stages = stages + 1
        self.bases = dict(bases)
        self._ty_cache: dict[Ty, Obj] = {}
        self._ctx_cache: dict = {}

    # -- plumbing ----------------------------------------------------------

    def base_obj(self, name: str) -> Obj:
        if name not in self.bases:
            raise UnknownBaseType(f"base type {name} is not configured "
                                  f"in model kind {self.kind}")
        return self.bases[name]

    def supports(self, mode: Mode) -> bool:
        raise NotImplementedError

    def require(self, mode: Mode):
        if not self.supports(mode):
            raise ModeUnsupported(f"{self.kind} model does not support {mode}")

    # -- modal structure ----------------------------------------------------

    def dia_obj(self, x: Obj) -> Obj:
        raise NotImplementedError

    def dia_mor(self, f: Mor) -> Mor:
        raise NotImplementedError

    def box_obj(self, x: Obj) -> Obj:
        raise NotImplementedError

    def box_mor(self, f: Mor) -> Mor:
        raise NotImplementedError

    def transpose(self, x: Obj, y: Obj, f: Mor) -> Mor:
        """Mor(dia x, y) -> Mor(x, box y)."""
        raise NotImplementedError

    def untranspose(self, x: Obj, y: Obj, g: Mor) -> Mor:
        """Mor(x, box y) -> Mor(dia x, y)."""
        raise NotImplementedError

    def eta_m(self, x: Obj) -> Mor:
        """Unit of the modal adjunction: x -> box dia x."""
        return self.transpose(x, self.dia_obj(x), identity(self.dia_obj(x)))

    def eps_m(self, y: Obj) -> Mor:
        """Counit: dia box y -> y."""
        return self.untranspose(self.box_obj(y), y, identity(self.box_obj(y)))

    # IS4 extension: dia is a monad with invertible multiplication.

    @property
    def has_monad(self) -> bool:
        return False

    def monad_eta(self, x: Obj) -> Mor:
        raise ModeUnsupported(f"{self.kind} model has no monad structure")

    def monad_mu(self, x: Obj) -> Mor:
        raise ModeUnsupported(f"{self.kind} model has no monad structure")

    # IR extension: a point Id -> box preserved by box.

    @property
    def has_point(self) -> bool:
        return False

    def point_r(self, x: Obj) -> Mor:
        raise ModeUnsupported(f"{self.kind} model has no point")

    def q(self, x: Obj) -> Mor:
        """dia x -> x, the adjoint transpose of the point."""
        return self.untranspose(x, x, self.point_r(x))


class IdentityModel(Model):
    """Finite sets; both modal functors are the identity. Valid for every
    mode: the identity is an idempotent comonad and its own point."""

    kind = "identity"

    def __init__(self, bases: dict[str, Obj]):
        super().__init__(0, bases)

    def supports(self, mode: Mode) -> bool:
        return True

    def dia_obj(self, x: Obj) -> Obj:
        return x

    def dia_mor(self, f: Mor) -> Mor:
        return f

    box_obj = dia_obj
    box_mor = dia_mor

    def transpose(self, x: Obj, y: Obj, f: Mor) -> Mor:
        return f

    untranspose = transpose

    has_monad = True
    has_point = True

    def monad_eta(self, x: Obj) -> Mor:
        return identity(x)

    monad_mu = monad_eta
    point_r = monad_eta


class ChainModel(Model):
    """Finite-set-valued functors on the linear order 0 < ... < N.

    dia shifts right (initial object at stage 0), box shifts left
    (terminal at stage N); the point r is the transition itself, so
    box r = r holds stage-wise. An IK / IK-dia / IR model; there is no
    monad unit into dia (stage 0 is empty), so not an IS4 model.
    """

    kind = "chain"

    def __init__(self, stages: int, bases: dict[str, Obj]):
        if stages < 1:
            raise ShapeMismatch("a chain model needs at least one transition")
        super().__init__(stages, bases)

    def supports(self, mode: Mode) -> bool:
        return mode.calculus in ("IK", "IR")

    def dia_obj(self, x: Obj) -> Obj:
        stages = ((),) + x.stages[:-1]
        trans = ((),) + x.trans[:-1]
        return Obj(stages, trans)

    def dia_mor(self, f: Mor) -> Mor:
        return Mor(self.dia_obj(f.dom), self.dia_obj(f.cod), ((),) + f.maps[:-1])

    def box_obj(self, x: Obj) -> Obj:
        stages = x.stages[1:] + (((),),)
        trans = x.trans[1:] + (((),) * len(x.stages[-1]),)
        return Obj(stages, trans)

    def box_mor(self, f: Mor) -> Mor:
        maps = f.maps[1:] + (((),),)  # final stage of box(dom) is the unit point
        return Mor(self.box_obj(f.dom), self.box_obj(f.cod), maps)

    def transpose(self, x: Obj, y: Obj, f: Mor) -> Mor:
        if f.dom != self.dia_obj(x) or f.cod != y:
            raise ShapeMismatch("transpose shape mismatch")
        maps = f.maps[1:] + (((),) * len(x.stages[-1]),)
        return Mor(x, self.box_obj(y), maps)

    def untranspose(self, x: Obj, y: Obj, g: Mor) -> Mor:
        if g.dom != x or g.cod != self.box_obj(y):
            raise ShapeMismatch("untranspose shape mismatch")
        maps = ((),) + g.maps[:-1]
        return Mor(self.dia_obj(x), y, maps)

    has_point = True

    def point_r(self, x: Obj) -> Mor:
        maps = x.trans + (((),) * len(x.stages[-1]),)
        return Mor(x, self.box_obj(x), maps)


class ConstantComonadModel(Model):
    """Same base category; box is the constant functor at stage 0, dia the
    constant functor at stage N. The multiplication of the dia monad is
    the identity, so idempotence holds on the nose: an IS4 (and IK) model.
    No point Id -> box exists in general, so not an IR model.
    """

    kind = "constant_comonad"

    def supports(self, mode: Mode) -> bool:
        return mode.calculus in ("IK", "IS4")

    def _constant(self, carrier) -> Obj:
        n = self.n_stages
        return Obj([tuple(carrier)] * n, [tuple(carrier)] * (n - 1))

    def dia_obj(self, x: Obj) -> Obj:
        return self._constant(x.stages[-1])

    def dia_mor(self, f: Mor) -> Mor:
        return Mor(self.dia_obj(f.dom), self.dia_obj(f.cod),
                   (f.maps[-1],) * self.n_stages)

    def box_obj(self, x: Obj) -> Obj:
        return self._constant(x.stages[0])

    def box_mor(self, f: Mor) -> Mor:
        return Mor(self.box_obj(f.dom), self.box_obj(f.cod),
                   (f.maps[0],) * self.n_stages)

    def transpose(self, x: Obj, y: Obj, f: Mor) -> Mor:
        if f.dom != self.dia_obj(x) or f.cod != y:
            raise ShapeMismatch("transpose shape mismatch")
        # f is determined by its stage-0 component X_N -> Y_0.
        base = f.maps[0]
        maps = []
        for k in range(self.n_stages):
            maps.append(tuple(base[x.index(self.stages, x.transport(k, self.stages, e))]
                              for e in x.stages[k]))
        return Mor(x, self.box_obj(y), maps)

    def untranspose(self, x: Obj, y: Obj, g: Mor) -> Mor:
        if g.dom != x or g.cod != self.box_obj(y):
            raise ShapeMismatch("untranspose shape mismatch")
        base = g.maps[-1]  # X_N -> Y_0
        maps = tuple(tuple(y.transport(0, k, v) for v in base)
                     for k in range(self.n_stages))
        return Mor(self.dia_obj(x), y, maps)

    has_monad = True

    def monad_eta(self, x: Obj) -> Mor:
        maps = tuple(tuple(x.transport(k, self.stages, e) for e in x.stages[k])
                     for k in range(self.n_stages))
        return Mor(x, self.dia_obj(x), maps)

    def monad_mu(self, x: Obj) -> Mor:
        d = self.dia_obj(x)
        return Mor(self.dia_obj(d), d, d.stages)


# ---------------------------------------------------------------------------
# Construction helpers

def base_from_tables(n_stages: int, sizes, tables) -> Obj:
    if len(sizes) != n_stages or len(tables) != n_stages - 1:
        raise ShapeMismatch("base interpretation shape mismatch")
    stages = [tuple(range(sz)) for sz in sizes]
    return Obj(stages, [tuple(t) for t in tables])


def default_tables(sizes) -> list[tuple[int, ...]]:
    """A canonical transition family: i maps to min(i, next size - 1)."""
    out = []
    for k in range(len(sizes) - 1):
        if sizes[k] > 0 and sizes[k + 1] == 0:
            raise ShapeMismatch("no function into an empty stage")
        out.append(tuple(min(i, sizes[k + 1] - 1) for i in range(sizes[k])))
    return out


def make_model(kind: str, stages: int, bases: dict) -> Model:
    """bases maps a base-type name to an int (constant size, default
    tables), a size list (default tables), or a (sizes, tables) pair."""
    n = stages + 1
    objs = {}
    for name, spec in bases.items():
        if isinstance(spec, int):
            sizes, tables = [spec] * n, None
        elif len(spec) == 2 and isinstance(spec[0], (list, tuple)):
            sizes, tables = list(spec[0]), [list(t) for t in spec[1]]
        else:
            sizes, tables = list(spec), None
        if tables is None:
            tables = default_tables(sizes)
        objs[name] = base_from_tables(n, sizes, tables)
    if kind == "identity":
        if stages != 0:
            raise ShapeMismatch("identity model has a single stage")
        return IdentityModel(objs)
    if kind == "chain":
        return ChainModel(stages, objs)
    if kind == "constant_comonad":
        return ConstantComonadModel(stages, objs)
    raise ValueError(f"unknown model kind {kind!r}")


def model_from_decl(decl: ModelDecl) -> Model:
    bases = {name: (list(bi.sizes), [list(t) for t in bi.tables])
             for name, bi in decl.bases.items()}
    return make_model(decl.kind, decl.stages, bases)
