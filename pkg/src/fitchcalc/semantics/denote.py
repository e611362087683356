"""Denotation of typing derivations into the finite models.

Contexts denote: empty = 1, a binding multiplies, a lock applies dia.
Open transposes its premise and then travels back along the recorded
split: a plain projection in IK (the suffix is lock-free), the lock
replacement transformation l in IS4, the weakening transformation w in
IR. Case and abort use that products and dia preserve coproducts and
the initial object, which holds stage-wise in every built-in model.
"""

from __future__ import annotations

from ..syntax import (
    Base, Box, Ctx, CtxEntry, Dia, Empty, Fun, Lock, Prod, Sum, Term, Ty,
    Unit, VarBind,
)
from ..typecheck import Derivation
from .core import (
    Mor, Obj, bang, compose, copair, coproduct, curry, ev, exponential,
    identity, initial, inj1, inj2, invert, mor_eq, pairing, product,
    product_mor, proj1, proj2, terminal, unique_from_empty,
)
from .models import Model, ModeUnsupported


def denote_type(m: Model, ty: Ty) -> Obj:
    cached = m._ty_cache.get(ty)
    if cached is not None:
        return cached
    match ty:
        case Base(name):
            obj = m.base_obj(name)
        case Unit():
            obj = terminal(m.n_stages)
        case Empty():
            obj = initial(m.n_stages)
        case Prod(a, b):
            obj = product(denote_type(m, a), denote_type(m, b))
        case Sum(a, b):
            obj = coproduct(denote_type(m, a), denote_type(m, b))
        case Fun(a, b):
            obj = exponential(denote_type(m, a), denote_type(m, b))
        case Box(a):
            obj = m.box_obj(denote_type(m, a))
        case Dia(a):
            obj = m.dia_obj(denote_type(m, a))
        case _:
            raise TypeError(f"not a type: {ty!r}")
    m._ty_cache[ty] = obj
    return obj


def denote_ctx(m: Model, ctx: Ctx) -> Obj:
    cached = m._ctx_cache.get(ctx)
    if cached is not None:
        return cached
    obj = terminal(m.n_stages)
    for entry in ctx.entries:
        if isinstance(entry, VarBind):
            obj = product(obj, denote_type(m, entry.ty))
        else:
            obj = m.dia_obj(obj)
    m._ctx_cache[ctx] = obj
    return obj


# ---------------------------------------------------------------------------
# Context suffixes as endofunctors

def suffix_obj(m: Model, x: Obj, suffix: tuple[CtxEntry, ...]) -> Obj:
    for entry in suffix:
        if isinstance(entry, VarBind):
            x = product(x, denote_type(m, entry.ty))
        else:
            x = m.dia_obj(x)
    return x


def suffix_mor(m: Model, f: Mor, suffix: tuple[CtxEntry, ...]) -> Mor:
    for entry in suffix:
        if isinstance(entry, VarBind):
            f = product_mor(f, identity(denote_type(m, entry.ty)))
        else:
            f = m.dia_mor(f)
    return f


def _proj_prefix(m: Model, x: Obj, suffix: tuple[CtxEntry, ...]) -> Mor:
    """Projection suffix-applied(x) -> x for a lock-free suffix."""
    objs = [x]
    for entry in suffix:
        assert isinstance(entry, VarBind)
        objs.append(product(objs[-1], denote_type(m, entry.ty)))
    mor = identity(x)
    for i in range(len(suffix), 0, -1):
        ty = denote_type(m, suffix[i - 1].ty)
        mor = compose(mor, proj1(objs[i - 1], ty))
    return mor


def lock_repl_nat(m: Model, suffix: Ctx | tuple[CtxEntry, ...]):
    """The lock replacement transformation l: at an object X, a morphism
    suffix(X) -> dia X. Requires the model's monad structure (IS4)."""
    if not m.has_monad:
        raise ModeUnsupported(f"{m.kind} model has no monad structure for l")
    entries = suffix.entries if isinstance(suffix, Ctx) else tuple(suffix)

    def at(x: Obj) -> Mor:
        if not entries:
            return m.monad_eta(x)
        head, last = entries[:-1], entries[-1]
        inner = lock_repl_nat(m, head)(x)
        if isinstance(last, VarBind):
            return compose(inner, proj1(suffix_obj(m, x, head),
                                        denote_type(m, last.ty)))
        return compose(m.monad_mu(x), m.dia_mor(inner))

    return at


def weakening_nat(m: Model, suffix: Ctx | tuple[CtxEntry, ...]):
    """The weakening transformation w: at an object X, a morphism
    suffix(X) -> X. Requires the model's point (IR)."""
    if not m.has_point:
        raise ModeUnsupported(f"{m.kind} model has no point for w")
    entries = suffix.entries if isinstance(suffix, Ctx) else tuple(suffix)

    def at(x: Obj) -> Mor:
        if not entries:
            return identity(x)
        head, last = entries[:-1], entries[-1]
        inner = weakening_nat(m, head)(x)
        if isinstance(last, VarBind):
            return compose(inner, proj1(suffix_obj(m, x, head),
                                        denote_type(m, last.ty)))
        return compose(inner, m.q(suffix_obj(m, x, head)))

    return at


# ---------------------------------------------------------------------------
# Denotation of derivations

def denote(m: Model, d: Derivation) -> Mor:
    m.require(d.mode)
    return _denote(m, d)


def _denote(m: Model, d: Derivation) -> Mor:
    ctx_obj = denote_ctx(m, d.ctx)
    mode = d.mode.calculus
    match d.rule:
        case "Var":
            i = d.split
            prefix_obj = denote_ctx(m, d.ctx.prefix(i + 1))
            suffix = d.ctx.entries[i + 1:]
            pr2 = proj2(denote_ctx(m, d.ctx.prefix(i)), denote_type(m, d.ty))
            if mode == "IR":
                back = weakening_nat(m, suffix)(prefix_obj)
            else:
                back = _proj_prefix(m, prefix_obj, suffix)
            return compose(pr2, back)
        case "Lam":
            body = _denote(m, d.children[0])
            a = denote_type(m, d.ty.arg)
            return curry(body, ctx_obj, a, denote_type(m, d.ty.res))
        case "App":
            f = _denote(m, d.children[0])
            a = _denote(m, d.children[1])
            arg_ty = denote_type(m, d.children[1].ty)
            return compose(ev(arg_ty, denote_type(m, d.ty)), pairing(f, a))
        case "Unit":
            return bang(ctx_obj)
        case "Pair":
            return pairing(_denote(m, d.children[0]), _denote(m, d.children[1]))
        case "Proj1":
            child = d.children[0]
            return compose(proj1(denote_type(m, child.ty.left),
                                 denote_type(m, child.ty.right)),
                           _denote(m, child))
        case "Proj2":
            child = d.children[0]
            return compose(proj2(denote_type(m, child.ty.left),
                                 denote_type(m, child.ty.right)),
                           _denote(m, child))
        case "Inl":
            return compose(inj1(denote_type(m, d.ty.left), denote_type(m, d.ty.right)),
                           _denote(m, d.children[0]))
        case "Inr":
            return compose(inj2(denote_type(m, d.ty.left), denote_type(m, d.ty.right)),
                           _denote(m, d.children[0]))
        case "Case":
            return _denote_case(m, d)
        case "Abort":
            scrut = _denote(m, d.children[0])
            suffix = d.ctx.entries[d.split:]
            weakened = suffix_mor(m, scrut, suffix)  # ctx -> suffix(0)
            return compose(unique_from_empty(weakened.cod, denote_type(m, d.ty)),
                           weakened)
        case "Shut":
            body = _denote(m, d.children[0])  # dia(ctx) -> A
            return m.transpose(ctx_obj, denote_type(m, d.children[0].ty), body)
        case "Open":
            child = d.children[0]
            prefix_obj = denote_ctx(m, child.ctx)
            t = _denote(m, child)
            opened = m.untranspose(prefix_obj, denote_type(m, d.ty), t)
            return compose(opened, _travel(m, d, prefix_obj))
        case "DiaIntro":
            child = d.children[0]
            prefix_obj = denote_ctx(m, child.ctx)
            t = m.dia_mor(_denote(m, child))
            return compose(t, _travel(m, d, prefix_obj))
        case "LetDia":
            scrut = _denote(m, d.children[0])  # ctx -> dia A
            body = _denote(m, d.children[1])  # dia(1 x A) -> B
            a = denote_type(m, d.children[0].ty.body)
            into_pair = m.dia_mor(pairing(bang(a), identity(a)))
            return compose(body, compose(into_pair, scrut))
    raise ValueError(f"unknown rule {d.rule}")


def _travel(m: Model, d: Derivation, prefix_obj: Obj) -> Mor:
    """The map from the conclusion context back to dia(prefix), depending
    on the mode: projection (IK), lock replacement (IS4), weakening (IR)."""
    mode = d.mode.calculus
    if mode == "IK":
        suffix = d.ctx.entries[d.split + 1:]
        return _proj_prefix(m, m.dia_obj(prefix_obj), suffix)
    if mode == "IS4":
        suffix = d.ctx.entries[d.split:]
        return lock_repl_nat(m, suffix)(prefix_obj)
    suffix = d.ctx.entries[d.split + 1:]
    return weakening_nat(m, suffix)(m.dia_obj(prefix_obj))


def _denote_case(m: Model, d: Derivation) -> Mor:
    scrut, left, right = d.children
    g = denote_ctx(m, d.ctx.prefix(d.split))
    sum_ty = scrut.ty
    a = denote_type(m, sum_ty.left)
    b = denote_type(m, sum_ty.right)
    suffix_a = left.ctx.entries[d.split + 1:]
    # Instantiate the suffix functor at G x (A+B), G x A and G x B.
    s = _denote(m, scrut)
    spread = suffix_mor(m, pairing(identity(g), s), suffix_a)
    canL = suffix_mor(m, product_mor(identity(g), inj1(a, b)), suffix_a)
    canR = suffix_mor(m, product_mor(identity(g), inj2(a, b)), suffix_a)
    dist = invert(copair(canL, canR))  # suffix(G x (A+B)) ~ suffix(G x A) + suffix(G x B)
    branches = copair(_denote(m, left), _denote(m, right))
    return compose(branches, compose(dist, spread))


def eval_closed(m: Model, d: Derivation) -> tuple:
    """The element family a closed derivation picks out of its type."""
    if len(d.ctx) != 0:
        raise ValueError("eval_closed needs a closed derivation")
    mor = denote(m, d)
    return tuple(mor.maps[k][0] for k in range(mor.dom.n_stages))
