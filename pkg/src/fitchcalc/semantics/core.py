"""Finite staged sets: the base category for every built-in model.

An Obj is a family of finite carrier sets, one per stage 0..N, with
transition functions between consecutive stages; a Mor is a stage-wise
function commuting with the transitions. Everything is represented
positionally over explicitly ordered carriers, so morphism equality is
exact and decidable. N = 0 gives plain finite sets.

Elements are hashable values: ints for base carriers, () for the
terminal point, (a, b) for pairs, ("inl", a) / ("inr", b) for sums and
("fn", (table_k, ..., table_N)) for natural families (exponentials).
"""

from __future__ import annotations

from itertools import product as iproduct


class ShapeMismatch(Exception):
    pass


VALIDATE_NATURALITY = True


class Obj:
    __slots__ = ("stages", "trans", "_index", "_hash")

    def __init__(self, stages, trans):
        self.stages = tuple(tuple(s) for s in stages)
        self.trans = tuple(tuple(t) for t in trans)
        if len(self.trans) != len(self.stages) - 1:
            raise ShapeMismatch("need one transition per consecutive stage pair")
        for k, table in enumerate(self.trans):
            if len(table) != len(self.stages[k]):
                raise ShapeMismatch(f"transition {k} length mismatch")
        self._index = tuple({x: i for i, x in enumerate(s)} for s in self.stages)
        self._hash = hash((self.stages, self.trans))

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    def index(self, k: int, x) -> int:
        return self._index[k][x]

    def step(self, k: int, x):
        """Transition image of x from stage k to k+1."""
        return self.trans[k][self._index[k][x]]

    def transport(self, j: int, k: int, x):
        for s in range(j, k):
            x = self.step(s, x)
        return x

    def card(self) -> int:
        return max(len(s) for s in self.stages)

    def __eq__(self, other):
        return (isinstance(other, Obj) and self.stages == other.stages
                and self.trans == other.trans)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Obj{tuple(len(s) for s in self.stages)}"


class Mor:
    __slots__ = ("dom", "cod", "maps", "_hash")

    def __init__(self, dom: Obj, cod: Obj, maps):
        self.dom = dom
        self.cod = cod
        self.maps = tuple(tuple(m) for m in maps)
        if len(self.maps) != dom.n_stages or dom.n_stages != cod.n_stages:
            raise ShapeMismatch("stage count mismatch")
        for k, m in enumerate(self.maps):
            if len(m) != len(dom.stages[k]):
                raise ShapeMismatch(f"map {k} length mismatch")
        if VALIDATE_NATURALITY:
            self._validate()
        self._hash = hash((self.dom, self.cod, self.maps))

    def _validate(self):
        for k in range(self.dom.n_stages - 1):
            for i, x in enumerate(self.dom.stages[k]):
                lhs = self.cod.step(k, self.maps[k][i])
                rhs = self.maps[k + 1][self.dom.index(k + 1, self.dom.step(k, x))]
                if lhs != rhs:
                    raise ShapeMismatch(
                        f"naturality fails at stage {k}, element {x!r}")
        for k, m in enumerate(self.maps):
            for y in m:
                if y not in self.cod._index[k]:
                    raise ShapeMismatch(f"image not in codomain at stage {k}")

    def apply(self, k: int, x):
        return self.maps[k][self.dom.index(k, x)]

    def __eq__(self, other):
        return (isinstance(other, Mor) and self.dom == other.dom
                and self.cod == other.cod and self.maps == other.maps)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Mor({self.dom!r} -> {self.cod!r})"


def mor_eq(m1: Mor, m2: Mor) -> bool:
    """Stage-wise pointwise equality; domains and codomains must agree."""
    if m1.dom != m2.dom or m1.cod != m2.cod:
        raise ShapeMismatch("comparing morphisms of different shapes")
    return m1.maps == m2.maps


# ---------------------------------------------------------------------------
# Cartesian structure

def identity(x: Obj) -> Mor:
    return Mor(x, x, x.stages)


def compose(f: Mor, g: Mor) -> Mor:
    """f after g."""
    if g.cod != f.dom:
        raise ShapeMismatch("composition shape mismatch")
    maps = tuple(tuple(f.maps[k][f.dom.index(k, y)] for y in g.maps[k])
                 for k in range(g.dom.n_stages))
    return Mor(g.dom, f.cod, maps)


def terminal(n_stages: int) -> Obj:
    return Obj([((),)] * n_stages, [((),)] * (n_stages - 1))


def bang(x: Obj) -> Mor:
    one = terminal(x.n_stages)
    return Mor(x, one, tuple(((),) * len(s) for s in x.stages))


def initial(n_stages: int) -> Obj:
    return Obj([()] * n_stages, [()] * (n_stages - 1))


def from_initial(x: Obj) -> Mor:
    zero = initial(x.n_stages)
    return Mor(zero, x, tuple(() for _ in x.stages))


def is_empty(x: Obj) -> bool:
    return all(len(s) == 0 for s in x.stages)


def unique_from_empty(src: Obj, dst: Obj) -> Mor:
    if not is_empty(src):
        raise ShapeMismatch("source is not empty")
    return Mor(src, dst, tuple(() for _ in src.stages))


def product(a: Obj, b: Obj) -> Obj:
    stages = tuple(tuple((x, y) for x in a.stages[k] for y in b.stages[k])
                   for k in range(a.n_stages))
    trans = tuple(tuple((a.step(k, x), b.step(k, y)) for x in a.stages[k]
                        for y in b.stages[k])
                  for k in range(a.n_stages - 1))
    return Obj(stages, trans)


def proj1(a: Obj, b: Obj) -> Mor:
    p = product(a, b)
    return Mor(p, a, tuple(tuple(x for x, _ in p.stages[k]) for k in range(p.n_stages)))


def proj2(a: Obj, b: Obj) -> Mor:
    p = product(a, b)
    return Mor(p, b, tuple(tuple(y for _, y in p.stages[k]) for k in range(p.n_stages)))


def pairing(f: Mor, g: Mor) -> Mor:
    if f.dom != g.dom:
        raise ShapeMismatch("pairing needs a common domain")
    cod = product(f.cod, g.cod)
    maps = tuple(tuple((f.maps[k][i], g.maps[k][i]) for i in range(len(f.dom.stages[k])))
                 for k in range(f.dom.n_stages))
    return Mor(f.dom, cod, maps)


def product_mor(f: Mor, g: Mor) -> Mor:
    dom = product(f.dom, g.dom)
    cod = product(f.cod, g.cod)
    maps = tuple(tuple((f.apply(k, x), g.apply(k, y)) for x, y in dom.stages[k])
                 for k in range(dom.n_stages))
    return Mor(dom, cod, maps)


def coproduct(a: Obj, b: Obj) -> Obj:
    stages = tuple(tuple(("inl", x) for x in a.stages[k])
                   + tuple(("inr", y) for y in b.stages[k])
                   for k in range(a.n_stages))
    trans = tuple(tuple(("inl", a.step(k, x)) for x in a.stages[k])
                  + tuple(("inr", b.step(k, y)) for y in b.stages[k])
                  for k in range(a.n_stages - 1))
    return Obj(stages, trans)


def inj1(a: Obj, b: Obj) -> Mor:
    c = coproduct(a, b)
    return Mor(a, c, tuple(tuple(("inl", x) for x in a.stages[k])
                           for k in range(a.n_stages)))


def inj2(a: Obj, b: Obj) -> Mor:
    c = coproduct(a, b)
    return Mor(b, c, tuple(tuple(("inr", y) for y in b.stages[k])
                           for k in range(b.n_stages)))


def copair(f: Mor, g: Mor) -> Mor:
    if f.cod != g.cod:
        raise ShapeMismatch("copairing needs a common codomain")
    dom = coproduct(f.dom, g.dom)
    maps = tuple(f.maps[k] + g.maps[k] for k in range(dom.n_stages))
    return Mor(dom, f.cod, maps)


def invert(f: Mor) -> Mor:
    """Inverse of a stage-wise bijection."""
    maps = []
    for k in range(f.dom.n_stages):
        if len(f.dom.stages[k]) != len(f.cod.stages[k]) or \
                len(set(f.maps[k])) != len(f.maps[k]):
            raise ShapeMismatch(f"not a bijection at stage {k}")
        back = {y: x for x, y in zip(f.dom.stages[k], f.maps[k])}
        maps.append(tuple(back[y] for y in f.cod.stages[k]))
    return Mor(f.cod, f.dom, maps)


# ---------------------------------------------------------------------------
# Exponentials: (B^A)_k is the set of natural families (A_j -> B_j) for
# j >= k, enumerated exhaustively.

def _families_from(a: Obj, b: Obj, k: int) -> list[tuple]:
    """All (table_k, ..., table_N) with table_{j+1} . a.trans = b.trans . table_j."""
    n = a.n_stages
    out: list[tuple] = []

    def extend(j: int, prefix: tuple):
        if j == n:
            out.append(prefix)
            return
        if not prefix:
            for tbl in iproduct(b.stages[j], repeat=len(a.stages[j])):
                extend(j + 1, (tbl,))
            return
        prev = prefix[-1]
        # Positions of stage-j elements constrained by the previous table.
        forced: dict[int, object] = {}
        ok = True
        for i, x in enumerate(a.stages[j - 1]):
            tgt_idx = a.index(j, a.step(j - 1, x))
            want = b.step(j - 1, prev[i])
            if tgt_idx in forced and forced[tgt_idx] != want:
                ok = False
                break
            forced[tgt_idx] = want
        if not ok:
            return
        free = [i for i in range(len(a.stages[j])) if i not in forced]
        for choice in iproduct(b.stages[j], repeat=len(free)):
            tbl = [None] * len(a.stages[j])
            for i, v in forced.items():
                tbl[i] = v
            for i, v in zip(free, choice):
                tbl[i] = v
            extend(j + 1, prefix + (tuple(tbl),))

    extend(k, ())
    return out


_EXP_CACHE: dict[tuple[Obj, Obj], Obj] = {}


def exponential(a: Obj, b: Obj) -> Obj:
    cached = _EXP_CACHE.get((a, b))
    if cached is not None:
        return cached
    n = a.n_stages
    stages = tuple(tuple(("fn", fam) for fam in _families_from(a, b, k))
                   for k in range(n))
    trans = tuple(tuple(("fn", fam[1:]) for _, fam in stages[k])
                  for k in range(n - 1))
    obj = Obj(stages, trans)
    _EXP_CACHE[(a, b)] = obj
    return obj


_EV_CACHE: dict[tuple[Obj, Obj], Mor] = {}


def ev(a: Obj, b: Obj) -> Mor:
    """Evaluation (B^A) x A -> B."""
    cached = _EV_CACHE.get((a, b))
    if cached is not None:
        return cached
    e = exponential(a, b)
    dom = product(e, a)
    maps = tuple(tuple(fn[1][0][a.index(k, x)] for fn, x in dom.stages[k])
                 for k in range(a.n_stages))
    mor = Mor(dom, b, maps)
    _EV_CACHE[(a, b)] = mor
    return mor


def curry(f: Mor, z: Obj, a: Obj, b: Obj) -> Mor:
    """Transpose Z x A -> B to Z -> B^A."""
    if f.dom != product(z, a) or f.cod != b:
        raise ShapeMismatch("curry shape mismatch")
    e = exponential(a, b)
    n = z.n_stages
    maps = []
    for k in range(n):
        row = []
        for zx in z.stages[k]:
            fam = []
            cur = zx
            for j in range(k, n):
                fam.append(tuple(f.apply(j, (cur, ax)) for ax in a.stages[j]))
                if j < n - 1:
                    cur = z.step(j, cur)
            row.append(("fn", tuple(fam)))
        maps.append(tuple(row))
    return Mor(z, e, maps)


def all_morphisms(a: Obj, b: Obj, limit: int | None = None) -> list[Mor] | None:
    """Every natural transformation a -> b, or None if more than `limit`."""
    fams = _families_from(a, b, 0)
    if limit is not None and len(fams) > limit:
        return None
    return [Mor(a, b, fam) for fam in fams]
