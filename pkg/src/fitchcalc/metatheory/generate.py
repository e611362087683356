"""Seed-deterministic generation of well-typed terms, type-directed and
top-down, with redex planting so reduction suites see non-normal input.

Case, abort and let-dia are only ever emitted in *tail* positions (the
root, bodies of lambdas / branches / let-dia / shut) and as subjects of
`open` (exercising both commuting conversions); subtrees that can be
substituted into elimination positions (application arguments, injection
and pair payloads of planted redexes, dia subjects) never contain them.
Reduction therefore never creates an eliminated case/abort that the two
open commuting conversions cannot clear, which is exactly what the
subformula property needs over this distribution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..syntax import (
    Abort, App, Base, Box, Case, Ctx, Dia, DiaIntro, Empty, Fun, Inl, Inr,
    Lam, LetDia, Lock, Mode, Open, Pair, Prod, Proj1, Proj2, Shut, Sum, Term,
    Ty, Unit, UnitIntro, Var, VarBind, free_vars,
)
from ..typecheck import Derivation, TypecheckError, infer


class GenerationExhausted(Exception):
    pass


class _Dead(Exception):
    """A generation branch cannot meet its goal; try another option."""


class _Abort(Exception):
    """The attempt burned its work cap; restart with a fresh goal."""


# -- quick producibility filter ---------------------------------------------
# Optimistic closure of everything extractable from a type by eliminations;
# used to prune hopeless goals (base/empty types with no source) before
# recursing. Optimism (assuming function arguments are available) only
# costs retries, never coverage.

_CLOSURE: dict[Ty, frozenset[Ty]] = {}


def _type_closure(ty: Ty) -> frozenset[Ty]:
    got = _CLOSURE.get(ty)
    if got is not None:
        return got
    out = {ty}
    match ty:
        case Fun(_, b):
            out |= _type_closure(b)
        case Prod(a, b) | Sum(a, b):
            out |= _type_closure(a) | _type_closure(b)
        case Box(a) | Dia(a):
            out |= _type_closure(a)
    result = frozenset(out)
    _CLOSURE[ty] = result
    return result


_REACH: dict[tuple, frozenset[Ty]] = {}


def _ctx_reach(ctx: Ctx) -> frozenset[Ty]:
    got = _REACH.get(ctx.entries)
    if got is not None:
        return got
    out: frozenset[Ty] = frozenset()
    for e in ctx.entries:
        if isinstance(e, VarBind):
            out |= _type_closure(e.ty)
    _REACH[ctx.entries] = out
    return out


def _producible(cfg: GenConfig, reach: frozenset[Ty], ty: Ty) -> bool:
    if ty in reach or Empty() in reach:
        return True
    match ty:
        case Unit():
            return True
        case Base() | Empty():
            return False
        case Fun(a, b):
            return _producible(cfg, reach | _type_closure(a), b)
        case Prod(a, b):
            return _producible(cfg, reach, a) and _producible(cfg, reach, b)
        case Sum(a, b):
            return _producible(cfg, reach, a) or _producible(cfg, reach, b)
        case Box(a):
            return _producible(cfg, reach, a)
        case Dia(a):
            return cfg.mode.dia_enabled and _producible(cfg, reach, a)
    return True


@dataclass(frozen=True)
class GenConfig:
    mode: Mode
    max_size: int = 24
    base_types: tuple[str, ...] = ("A", "B")
    seed: int = 0
    redex_bias: float = 0.35
    max_ctx: int = 4
    max_type_depth: int = 2
    locks_only_ctx: bool = False  # canonicity wants variable-free contexts
    closed_types: bool = False  # sample only closed-inhabited goal types
    model_safe_types: bool = False  # keep exponentials small for denotation
    retry_budget: int = 400


class _Rng(random.Random):
    """Seeded RNG carrying a per-sample fresh-name counter and work cap."""

    def __init__(self, seed: str):
        super().__init__(seed)
        self.counter = 0
        self.work = 10_000


def gen_typed_term(cfg: GenConfig) -> tuple[Ctx, Term, Ty, Derivation]:
    """Deterministic in cfg.seed; the output always passes `check`."""
    # String seeding avoids hash randomization across processes.
    rng = _Rng(f"fitchcalc-gen-{cfg.seed}")
    for _ in range(cfg.retry_budget):
        ctx = _gen_ctx(rng, cfg)
        if cfg.closed_types:
            ty = _inhabited_type(rng, cfg, cfg.max_type_depth)
        else:
            ty = _gen_type(rng, cfg, cfg.max_type_depth)
        budget = rng.randint(3, max(3, cfg.max_size))
        rng.work = 60 * budget  # cap on generation steps per attempt
        try:
            term = _gen(rng, cfg, ctx, ty, budget, tail=True)
        except (_Dead, _Abort, RecursionError):
            continue
        try:
            got, deriv = infer(cfg.mode, ctx, term)
        except TypecheckError:
            continue
        if got == ty:
            return ctx, term, ty, deriv
    raise GenerationExhausted(
        f"no well-typed sample within {cfg.retry_budget} attempts (seed {cfg.seed})")


# ---------------------------------------------------------------------------
# Types and contexts

def _gen_type(rng: random.Random, cfg: GenConfig, depth: int) -> Ty:
    leafs = [lambda: Base(rng.choice(cfg.base_types)), lambda: Unit()]
    if depth <= 0:
        return rng.choice(leafs)()
    roll = rng.random()
    if roll < 0.42:
        return rng.choice(leafs)()
    if roll < 0.54:
        if cfg.model_safe_types:
            dom = _flat_type(rng, cfg)
        else:
            dom = _gen_type(rng, cfg, depth - 1)
        return Fun(dom, _gen_type(rng, cfg, depth - 1))
    if roll < 0.66:
        return Prod(_gen_type(rng, cfg, depth - 1), _gen_type(rng, cfg, depth - 1))
    if roll < 0.78:
        return Sum(_gen_type(rng, cfg, depth - 1), _gen_type(rng, cfg, depth - 1))
    if roll < 0.90 or not cfg.mode.dia_enabled:
        return Box(_gen_type(rng, cfg, depth - 1))
    return Dia(_gen_type(rng, cfg, depth - 1))


def _flat_type(rng: random.Random, cfg: GenConfig) -> Ty:
    base = Base(rng.choice(cfg.base_types))
    roll = rng.random()
    if roll < 0.55:
        return base
    if roll < 0.7:
        return Unit()
    if roll < 0.85:
        return Box(base)
    return Dia(base) if cfg.mode.dia_enabled else Box(base)


def _inhabited_type(rng: random.Random, cfg: GenConfig, depth: int) -> Ty:
    if depth <= 0:
        return Unit()
    roll = rng.random()
    if roll < 0.2:
        return Unit()
    if roll < 0.4:
        return Fun(_gen_type(rng, cfg, depth - 1), _inhabited_type(rng, cfg, depth - 1))
    if roll < 0.55:
        return Prod(_inhabited_type(rng, cfg, depth - 1),
                    _inhabited_type(rng, cfg, depth - 1))
    if roll < 0.7:
        inh = _inhabited_type(rng, cfg, depth - 1)
        other = _gen_type(rng, cfg, depth - 1)
        return Sum(inh, other) if rng.random() < 0.5 else Sum(other, inh)
    if roll < 0.9 or not cfg.mode.dia_enabled:
        return Box(_inhabited_type(rng, cfg, depth - 1))
    return Dia(_inhabited_type(rng, cfg, depth - 1))


def _gen_ctx(rng: random.Random, cfg: GenConfig) -> Ctx:
    entries: list = []
    n = rng.randint(0, cfg.max_ctx)
    for i in range(n):
        if cfg.locks_only_ctx or rng.random() < 0.3:
            entries.append(Lock())
        else:
            roll = rng.random()
            if roll < 0.12:
                ty: Ty = Empty()
            elif roll < 0.24:
                ty = Sum(_gen_type(rng, cfg, 1), _gen_type(rng, cfg, 1))
            else:
                ty = _gen_type(rng, cfg, cfg.max_type_depth)
            entries.append(VarBind(f"c{i}", ty))
    return Ctx(tuple(entries))


# ---------------------------------------------------------------------------
# Terms

def _usable(mode: Mode, ctx: Ctx) -> list[VarBind]:
    out = []
    for i, e in enumerate(ctx.entries):
        if isinstance(e, VarBind):
            if mode.calculus == "IR" or not any(
                    isinstance(e2, Lock) for e2 in ctx.entries[i + 1:]):
                out.append(e)
    return out


def _elim_paths(src: Ty, dst: Ty, depth: int = 3) -> list[tuple]:
    paths: list[tuple] = []
    if src == dst:
        paths.append(())
    if depth == 0:
        return paths
    match src:
        case Fun(a, b):
            paths.extend((("app", a),) + p for p in _elim_paths(b, dst, depth - 1))
        case Prod(a, b):
            paths.extend((("p1",),) + p for p in _elim_paths(a, dst, depth - 1))
            paths.extend((("p2",),) + p for p in _elim_paths(b, dst, depth - 1))
    return paths


def _open_prefix(rng: random.Random, mode: Mode, ctx: Ctx) -> int:
    """Prefix length for the subject of open/dia, per the mode's policy."""
    if mode.calculus == "IS4":
        return rng.randint(0, len(ctx))
    locks = ctx.lock_positions()
    if not locks:
        raise _Dead
    if mode.calculus == "IK" or rng.random() < 0.7:
        return locks[-1]
    return rng.choice(locks)


def _split_budget(rng: random.Random, budget: int, parts: int) -> list[int]:
    cuts = sorted(rng.randint(0, budget) for _ in range(parts - 1))
    pieces = []
    prev = 0
    for c in cuts + [budget]:
        pieces.append(max(1, c - prev))
        prev = c
    return pieces


def _gen(rng, cfg: GenConfig, ctx: Ctx, ty: Ty, budget: int,
         tail: bool) -> Term:
    rng.work -= 1
    if rng.work <= 0:
        raise _Abort
    if not _producible(cfg, _ctx_reach(ctx), ty):
        raise _Dead
    mode = cfg.mode
    options: list[tuple[float, object]] = []
    usable = _usable(mode, ctx)
    exact = [v for v in usable if v.ty == ty]
    hungry = budget >= 5  # bias against leaves while budget remains

    if exact:
        options.append((0.8 if hungry else 8.0,
                        lambda: Var(rng.choice(exact).name)))

    if budget <= 1:
        # leaf positions: a variable or the unit point, nothing recursive
        if ty == Unit():
            options.append((4.0, lambda: UnitIntro()))
        for thunk in _weighted_order(rng, options):
            try:
                return thunk()
            except _Dead:
                continue
        raise _Dead

    intro_w = 0.6 if hungry and isinstance(ty, Unit) else 4.0
    options.append((intro_w, lambda: _intro(rng, cfg, ctx, ty, budget, tail)))

    spines = [(v, p) for v in usable for p in _elim_paths(v.ty, ty)
              if p and len(p) < budget]
    if spines:
        options.append((3.0, lambda: _spine(rng, cfg, ctx, rng.choice(spines), budget)))

    if budget >= 2:
        options.append((2.0, lambda: _open_wrap(rng, cfg, ctx, ty, budget, tail)))

    if budget >= 3:
        options.append((3.5 * cfg.redex_bias,
                        lambda: _plant_beta_fun(rng, cfg, ctx, ty, budget, tail)))
        options.append((2.0 * cfg.redex_bias,
                        lambda: _plant_beta_pair(rng, cfg, ctx, ty, budget, tail)))

    if tail:
        if mode.dia_enabled and budget >= 3:
            options.append((1.8, lambda: _letdia(rng, cfg, ctx, ty, budget, plant=False)))
            options.append((1.8 * cfg.redex_bias,
                            lambda: _letdia(rng, cfg, ctx, ty, budget, plant=True)))
        if budget >= 4:
            options.append((1.8, lambda: _case(rng, cfg, ctx, ty, budget, plant=False)))
            options.append((1.8 * cfg.redex_bias,
                            lambda: _case(rng, cfg, ctx, ty, budget, plant=True)))
            options.append((2.4 * cfg.redex_bias,
                            lambda: _plant_cc_case(rng, cfg, ctx, ty, budget)))
        if budget >= 2 and Empty() in _ctx_reach(ctx):
            options.append((1.2, lambda: _abort(rng, cfg, ctx, ty, budget)))
            options.append((1.6 * cfg.redex_bias,
                            lambda: _plant_cc_abort(rng, cfg, ctx, ty, budget)))

    for thunk in _weighted_order(rng, options):
        try:
            return thunk()
        except _Dead:
            continue
    raise _Dead


def _weighted_order(rng: random.Random, options):
    opts = list(options)
    out = []
    while opts:
        total = sum(w for w, _ in opts)
        r = rng.random() * total
        acc = 0.0
        chosen = len(opts) - 1
        for i, (w, _) in enumerate(opts):
            acc += w
            if r <= acc:
                chosen = i
                break
        out.append(opts.pop(chosen)[1])
    return out


def _fresh(rng, ctx: Ctx) -> str:
    rng.counter += 1
    return f"v{rng.counter}"


def _intro(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty, budget: int,
           tail: bool) -> Term:
    match ty:
        case Unit():
            return UnitIntro()
        case Fun(a, b):
            if budget < 2:
                raise _Dead
            x = _fresh(rng, ctx)
            return Lam(x, a, _gen(rng, cfg, ctx.extend(VarBind(x, a)), b,
                                  budget - 1, tail))
        case Prod(a, b):
            if budget < 3:
                raise _Dead
            b1, b2 = _split_budget(rng, budget - 1, 2)
            return Pair(_gen(rng, cfg, ctx, a, b1, tail),
                        _gen(rng, cfg, ctx, b, b2, tail))
        case Sum(a, b):
            if budget < 2:
                raise _Dead
            if rng.random() < 0.5:
                return Inl(b, _gen(rng, cfg, ctx, a, budget - 1, tail))
            return Inr(a, _gen(rng, cfg, ctx, b, budget - 1, tail))
        case Box(a):
            if budget < 2:
                raise _Dead
            return Shut(_gen(rng, cfg, ctx.extend(Lock()), a, budget - 1, tail))
        case Dia(a):
            if not cfg.mode.dia_enabled or budget < 2:
                raise _Dead
            k = _open_prefix(rng, cfg.mode, ctx)
            return DiaIntro(_gen(rng, cfg, ctx.prefix(k), a, budget - 1, False))
    raise _Dead  # base and empty types have no introduction form


def _spine(rng: random.Random, cfg: GenConfig, ctx: Ctx, choice, budget: int) -> Term:
    var, path = choice
    term: Term = Var(var.name)
    n_apps = sum(1 for s in path if s[0] == "app")
    budgets = _split_budget(rng, max(budget - 1 - len(path), n_apps), max(n_apps, 1))
    bi = 0
    for step in path:
        if step[0] == "app":
            term = App(term, _gen(rng, cfg, ctx, step[1], budgets[bi], False))
            bi += 1
        elif step[0] == "p1":
            term = Proj1(term)
        else:
            term = Proj2(term)
    return term


def _open_wrap(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty,
               budget: int, tail: bool) -> Term:
    k = _open_prefix(rng, cfg.mode, ctx)
    prefix = ctx.prefix(k)
    if rng.random() < cfg.redex_bias and budget >= 3:
        # plant open (shut w); after contraction w sits where open stood
        inner = _gen(rng, cfg, prefix.extend(Lock()), ty, budget - 2, tail)
        return Open(Shut(inner))
    return Open(_gen(rng, cfg, prefix, Box(ty), budget - 1, False))


def _plant_beta_fun(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty,
                    budget: int, tail: bool) -> Term:
    a = _gen_type(rng, cfg, 1) if not cfg.model_safe_types else _flat_type(rng, cfg)
    b1, b2 = _split_budget(rng, budget - 2, 2)
    x = _fresh(rng, ctx)
    body = _gen(rng, cfg, ctx.extend(VarBind(x, a)), ty, b1, tail)
    arg = _gen(rng, cfg, ctx, a, b2, False)
    return App(Lam(x, a, body), arg)


def _plant_beta_pair(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty,
                     budget: int, tail: bool) -> Term:
    other = _gen_type(rng, cfg, 1)
    b1, b2 = _split_budget(rng, budget - 2, 2)
    mine = _gen(rng, cfg, ctx, ty, b1, tail)
    theirs = _gen(rng, cfg, ctx, other, b2, False)
    if rng.random() < 0.5:
        return Proj1(Pair(mine, theirs))
    return Proj2(Pair(theirs, mine))


def _letdia(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty, budget: int,
            plant: bool) -> Term:
    a = _gen_type(rng, cfg, 1)
    b1, b2 = _split_budget(rng, budget - 1, 2)
    if plant:
        k = _open_prefix(rng, cfg.mode, ctx)
        scrut: Term = DiaIntro(_gen(rng, cfg, ctx.prefix(k), a, b1, False))
    else:
        scrut = _gen(rng, cfg, ctx, Dia(a), b1, False)
    x = _fresh(rng, ctx)
    body = _gen(rng, cfg, Ctx((VarBind(x, a), Lock())), ty, b2, True)
    return LetDia(x, a, scrut, body)


def _case(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty, budget: int,
          plant: bool) -> Term:
    mode = cfg.mode
    b1, b2, b3 = _split_budget(rng, budget - 1, 3)
    if plant:
        a = _gen_type(rng, cfg, 1)
        b = _gen_type(rng, cfg, 1)
        want = a if rng.random() < 0.5 else b
        payload = _gen(rng, cfg, ctx, want, b1, False)
        try:
            got, _ = infer(mode, ctx, payload)
        except TypecheckError:
            raise _Dead
        scrut = Inl(b, payload) if got == a else (
            Inr(a, payload) if got == b else None)
        if scrut is None:
            raise _Dead
        sum_ty = Sum(a, b)
    else:
        sums = [v for v in _usable(mode, ctx) if isinstance(v.ty, Sum)]
        if sums and rng.random() < 0.75:
            v = rng.choice(sums)
            scrut, sum_ty = Var(v.name), v.ty
        else:
            sum_ty = Sum(_gen_type(rng, cfg, 1), _gen_type(rng, cfg, 1))
            scrut = _gen(rng, cfg, ctx, sum_ty, b1, False)
    k = _min_prefix(ctx, scrut)
    try:
        got, _ = infer(mode, ctx.prefix(k), scrut)
    except TypecheckError:
        raise _Dead
    if got != sum_ty:
        raise _Dead
    x, y = _fresh(rng, ctx), _fresh(rng, ctx)
    lctx = Ctx(ctx.entries[:k] + (VarBind(x, sum_ty.left),) + ctx.entries[k:])
    rctx = Ctx(ctx.entries[:k] + (VarBind(y, sum_ty.right),) + ctx.entries[k:])
    return Case(scrut, x, _gen(rng, cfg, lctx, ty, b2, True),
                y, _gen(rng, cfg, rctx, ty, b3, True))


def _abort(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty, budget: int) -> Term:
    body = _gen(rng, cfg, ctx, Empty(), budget - 1, False)
    k = _min_prefix(ctx, body)
    try:
        got, _ = infer(cfg.mode, ctx.prefix(k), body)
    except TypecheckError:
        raise _Dead
    if got != Empty():
        raise _Dead
    return Abort(ty, body)


def _plant_cc_case(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty,
                   budget: int) -> Term:
    """open (case s of ... ) with the case typed at box ty in the open prefix."""
    k = _open_prefix(rng, cfg.mode, ctx)
    prefix = ctx.prefix(k)
    inner = _case(rng, cfg, prefix, Box(ty), budget - 1, plant=False)
    return Open(inner)


def _plant_cc_abort(rng: random.Random, cfg: GenConfig, ctx: Ctx, ty: Ty,
                    budget: int) -> Term:
    k = _open_prefix(rng, cfg.mode, ctx)
    prefix = ctx.prefix(k)
    inner = _abort(rng, cfg, prefix, Box(ty), budget - 1)
    return Open(inner)


def _min_prefix(ctx: Ctx, t: Term) -> int:
    k = 0
    for v in sorted(free_vars(t)):
        hit = ctx.lookup(v)
        if hit is None:
            raise _Dead
        k = max(k, hit[0] + 1)
    return k
