"""Mode-parameterized bidirectional type checking.

The declarative rules leave the context split at open/dia/case/abort
nodes implicit; `infer` resolves them with a fixed per-mode policy and
records every choice in the returned derivation, so a derivation is a
complete certificate. `validate_derivation` re-verifies each node
against the declarative schema without consulting `infer`, and
`enumerate_derivations` explores all schema-valid split choices.

Policies (open, and analogously dia):
  IK  -- split at the rightmost lock (forced: the suffix must be lock-free);
  IS4 -- split at the minimal prefix binding the subject's free variables;
  IR  -- try locks from rightmost to leftmost, accept the first prefix in
         which the subject checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    Abort, App, Box, Case, Ctx, Dia, DiaIntro, Empty, Fun, Inl, Inr, Lam,
    LetDia, Lock, Mode, Open, Pair, Prod, Proj1, Proj2, Shut, Sum, Term, Ty,
    Unit, UnitIntro, Var, VarBind, free_vars, fresh_name, subst,
)
from .surface import print_term, print_type


# ---------------------------------------------------------------------------
# Errors

class TypecheckError(Exception):
    def __init__(self, message: str, term: Term | None = None):
        self.term = term
        if term is not None:
            message = f"{message} (at `{print_term(term)}`)"
        super().__init__(message)


class UnboundVariable(TypecheckError):
    pass


class VariableBehindLock(TypecheckError):
    pass


class NoLockForOpen(TypecheckError):
    pass


class TypeMismatch(TypecheckError):
    def __init__(self, expected: Ty, got: Ty, term: Term | None = None):
        self.expected = expected
        self.got = got
        super().__init__(
            f"type mismatch: expected {print_type(expected)}, got {print_type(got)}", term)


class DiaDisabled(TypecheckError):
    pass


class SharedVariableInLetDia(TypecheckError):
    pass


class InvalidDerivation(Exception):
    pass


class BoundExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# Derivations

@dataclass(frozen=True, slots=True)
class Derivation:
    rule: str
    mode: Mode
    ctx: Ctx
    term: Term
    ty: Ty
    split: int | None
    children: tuple["Derivation", ...]

    def split_vector(self) -> tuple:
        return (self.split,) + tuple(c.split_vector() for c in self.children)


def _rename_binder(name: str, body: Term, ctx: Ctx) -> tuple[str, Term]:
    # Contexts keep variable names distinct, so shadowing binders are
    # renamed (deterministically) before entering the context.
    if ctx.lookup(name) is None:
        return name, body
    fresh = fresh_name(name, set(ctx.names()) | free_vars(body))
    return fresh, subst(body, name, Var(fresh))


def _minimal_prefix(ctx: Ctx, t: Term) -> int:
    """Length of the shortest prefix binding every free variable of t."""
    k = 0
    for v in free_vars(t):
        hit = ctx.lookup(v)
        if hit is None:
            raise UnboundVariable(f"unbound variable {v}", t)
        k = max(k, hit[0] + 1)
    return k


# ---------------------------------------------------------------------------
# Inference

def infer(mode: Mode, ctx: Ctx, t: Term) -> tuple[Ty, Derivation]:
    """Infer the unique type of t in ctx and return it with a derivation.

    Deterministic: repeated calls return identical derivations. The
    derivation's terms may differ from the input by renaming of bound
    variables when a binder shadows a context name.
    """
    match t:
        case Var(x):
            hit = ctx.lookup(x)
            if hit is None:
                raise UnboundVariable(f"unbound variable {x}", t)
            i, ty = hit
            if mode.calculus in ("IK", "IS4") and any(
                    isinstance(e, Lock) for e in ctx.entries[i + 1:]):
                raise VariableBehindLock(
                    f"variable {x} is used from behind a lock", t)
            return ty, Derivation("Var", mode, ctx, t, ty, i, ())

        case Lam(x, ty, body):
            x, body = _rename_binder(x, body, ctx)
            rty, sub = infer(mode, ctx.extend(VarBind(x, ty)), body)
            fun = Fun(ty, rty)
            return fun, Derivation("Lam", mode, ctx, Lam(x, ty, sub.term), fun, None, (sub,))

        case App(fn, arg):
            fty, dfn = infer(mode, ctx, fn)
            if not isinstance(fty, Fun):
                raise TypeMismatch(Fun(Unit(), Unit()), fty, fn)
            aty, darg = infer(mode, ctx, arg)
            if aty != fty.arg:
                raise TypeMismatch(fty.arg, aty, arg)
            return fty.res, Derivation("App", mode, ctx, App(dfn.term, darg.term),
                                       fty.res, None, (dfn, darg))

        case UnitIntro():
            return Unit(), Derivation("Unit", mode, ctx, t, Unit(), None, ())

        case Pair(a, b):
            ta, da = infer(mode, ctx, a)
            tb, db = infer(mode, ctx, b)
            ty = Prod(ta, tb)
            return ty, Derivation("Pair", mode, ctx, Pair(da.term, db.term), ty, None, (da, db))

        case Proj1(body):
            ty, d = infer(mode, ctx, body)
            if not isinstance(ty, Prod):
                raise TypeMismatch(Prod(Unit(), Unit()), ty, body)
            return ty.left, Derivation("Proj1", mode, ctx, Proj1(d.term), ty.left, None, (d,))

        case Proj2(body):
            ty, d = infer(mode, ctx, body)
            if not isinstance(ty, Prod):
                raise TypeMismatch(Prod(Unit(), Unit()), ty, body)
            return ty.right, Derivation("Proj2", mode, ctx, Proj2(d.term), ty.right, None, (d,))

        case Inl(rty, body):
            ty, d = infer(mode, ctx, body)
            sum_ty = Sum(ty, rty)
            return sum_ty, Derivation("Inl", mode, ctx, Inl(rty, d.term), sum_ty, None, (d,))

        case Inr(lty, body):
            ty, d = infer(mode, ctx, body)
            sum_ty = Sum(lty, ty)
            return sum_ty, Derivation("Inr", mode, ctx, Inr(lty, d.term), sum_ty, None, (d,))

        case Case(scrut, lx, lbody, rx, rbody):
            k = _minimal_prefix(ctx, scrut)
            sty, ds = infer(mode, ctx.prefix(k), scrut)
            if not isinstance(sty, Sum):
                raise TypeMismatch(Sum(Unit(), Unit()), sty, scrut)
            suffix = ctx.entries[k:]
            lx, lbody = _rename_binder(lx, lbody, ctx)
            rx, rbody = _rename_binder(rx, rbody, ctx)
            lctx = Ctx(ctx.entries[:k] + (VarBind(lx, sty.left),) + suffix)
            rctx = Ctx(ctx.entries[:k] + (VarBind(rx, sty.right),) + suffix)
            lty, dl = infer(mode, lctx, lbody)
            rty, dr = infer(mode, rctx, rbody)
            if lty != rty:
                raise TypeMismatch(lty, rty, rbody)
            term = Case(ds.term, lx, dl.term, rx, dr.term)
            return lty, Derivation("Case", mode, ctx, term, lty, k, (ds, dl, dr))

        case Abort(ty, body):
            k = _minimal_prefix(ctx, body)
            bty, d = infer(mode, ctx.prefix(k), body)
            if not isinstance(bty, Empty):
                raise TypeMismatch(Empty(), bty, body)
            return ty, Derivation("Abort", mode, ctx, Abort(ty, d.term), ty, k, (d,))

        case Shut(body):
            ty, d = infer(mode, ctx.extend(Lock()), body)
            box = Box(ty)
            return box, Derivation("Shut", mode, ctx, Shut(d.term), box, None, (d,))

        case Open(body):
            k, bty, d = _infer_behind_lock(mode, ctx, body, t)
            if not isinstance(bty, Box):
                raise TypeMismatch(Box(Unit()), bty, body)
            return bty.body, Derivation("Open", mode, ctx, Open(d.term), bty.body, k, (d,))

        case DiaIntro(body):
            if not mode.dia_enabled:
                raise DiaDisabled("dia syntax is disabled in this mode", t)
            k, bty, d = _infer_behind_lock(mode, ctx, body, t)
            dia = Dia(bty)
            return dia, Derivation("DiaIntro", mode, ctx, DiaIntro(d.term), dia, k, (d,))

        case LetDia(x, ty, scrut, body):
            if not mode.dia_enabled:
                raise DiaDisabled("let dia syntax is disabled in this mode", t)
            extra = free_vars(body) - {x}
            if extra:
                offender = sorted(extra)[0]
                if ctx.lookup(offender) is not None:
                    raise SharedVariableInLetDia(
                        f"variable {offender} may not be shared between the "
                        f"subterms of a let dia", t)
                raise UnboundVariable(f"unbound variable {offender}", body)
            sty, ds = infer(mode, ctx, scrut)
            if sty != Dia(ty):
                raise TypeMismatch(Dia(ty), sty, scrut)
            bctx = Ctx((VarBind(x, ty), Lock()))
            bty, db = infer(mode, bctx, body)
            term = LetDia(x, ty, ds.term, db.term)
            return bty, Derivation("LetDia", mode, ctx, term, bty, None, (ds, db))

    raise TypecheckError(f"not a term: {t!r}")


def _infer_behind_lock(mode: Mode, ctx: Ctx, body: Term, at: Term) -> tuple[int, Ty, Derivation]:
    """Resolve the split for open/dia per the mode's policy and infer the
    subject in the chosen prefix."""
    if mode.calculus == "IK":
        locks = ctx.lock_positions()
        if not locks:
            raise NoLockForOpen("the context contains no lock", at)
        k = locks[-1]
        ty, d = infer(mode, ctx.prefix(k), body)
        return k, ty, d
    if mode.calculus == "IS4":
        k = _minimal_prefix(ctx, body)
        ty, d = infer(mode, ctx.prefix(k), body)
        return k, ty, d
    # IR: rightmost-to-leftmost lock search.
    locks = ctx.lock_positions()
    if not locks:
        raise NoLockForOpen("the context contains no lock", at)
    err: TypecheckError | None = None
    for k in reversed(locks):
        try:
            ty, d = infer(mode, ctx.prefix(k), body)
            return k, ty, d
        except TypecheckError as exc:
            if err is None:
                err = exc
    raise err


def check(mode: Mode, ctx: Ctx, t: Term, ty: Ty) -> Derivation:
    got, deriv = infer(mode, ctx, t)
    if got != ty:
        raise TypeMismatch(ty, got, t)
    return deriv


# ---------------------------------------------------------------------------
# Independent derivation validator

def validate_derivation(d: Derivation) -> None:
    """Re-verify every node against the declarative rule schemas.

    Deliberately does not call `infer`: split policies are not enforced,
    only schema validity, so this also accepts the alternative splits
    produced by `enumerate_derivations` and the lemma transformations.
    Raises InvalidDerivation on the first bad node.
    """
    mode = d.mode

    def need(cond: bool, msg: str):
        if not cond:
            raise InvalidDerivation(f"{msg} (at `{print_term(d.term)}`, rule {d.rule})")

    for c in d.children:
        need(c.mode == mode, "child mode differs")

    match d.rule, d.term:
        case "Var", Var(x):
            need(d.split is not None and 0 <= d.split < len(d.ctx), "split out of range")
            entry = d.ctx[d.split]
            need(isinstance(entry, VarBind) and entry.name == x, "split does not bind the variable")
            need(entry.ty == d.ty, "variable type differs from binding")
            if mode.calculus in ("IK", "IS4"):
                need(not any(isinstance(e, Lock) for e in d.ctx.entries[d.split + 1:]),
                     "lock to the right of the binding")
            need(d.children == (), "Var has no premises")
        case "Lam", Lam(x, ty, body):
            need(len(d.children) == 1, "Lam has one premise")
            sub = d.children[0]
            need(sub.ctx == d.ctx.extend(VarBind(x, ty)), "Lam premise context")
            need(sub.term == body, "Lam premise term")
            need(d.ty == Fun(ty, sub.ty), "Lam conclusion type")
        case "App", App(fn, arg):
            need(len(d.children) == 2, "App has two premises")
            dfn, darg = d.children
            need(dfn.ctx == d.ctx and darg.ctx == d.ctx, "App premise contexts")
            need(dfn.term == fn and darg.term == arg, "App premise terms")
            need(dfn.ty == Fun(darg.ty, d.ty), "App types")
        case "Unit", UnitIntro():
            need(d.ty == Unit() and d.children == (), "Unit schema")
        case "Pair", Pair(a, b):
            need(len(d.children) == 2, "Pair has two premises")
            da, db = d.children
            need(da.ctx == d.ctx and db.ctx == d.ctx, "Pair premise contexts")
            need(da.term == a and db.term == b, "Pair premise terms")
            need(d.ty == Prod(da.ty, db.ty), "Pair conclusion type")
        case "Proj1", Proj1(body):
            (db,) = _need_children(d, 1)
            need(db.ctx == d.ctx and db.term == body, "Proj1 premise")
            need(isinstance(db.ty, Prod) and db.ty.left == d.ty, "Proj1 type")
        case "Proj2", Proj2(body):
            (db,) = _need_children(d, 1)
            need(db.ctx == d.ctx and db.term == body, "Proj2 premise")
            need(isinstance(db.ty, Prod) and db.ty.right == d.ty, "Proj2 type")
        case "Inl", Inl(rty, body):
            (db,) = _need_children(d, 1)
            need(db.ctx == d.ctx and db.term == body, "Inl premise")
            need(d.ty == Sum(db.ty, rty), "Inl type")
        case "Inr", Inr(lty, body):
            (db,) = _need_children(d, 1)
            need(db.ctx == d.ctx and db.term == body, "Inr premise")
            need(d.ty == Sum(lty, db.ty), "Inr type")
        case "Case", Case(scrut, lx, lbody, rx, rbody):
            need(len(d.children) == 3, "Case has three premises")
            ds, dl, dr = d.children
            k = d.split
            need(k is not None and 0 <= k <= len(d.ctx), "Case split out of range")
            need(ds.ctx == d.ctx.prefix(k) and ds.term == scrut, "Case scrutinee premise")
            need(isinstance(ds.ty, Sum), "Case scrutinee type")
            suffix = d.ctx.entries[k:]
            need(dl.ctx == Ctx(d.ctx.entries[:k] + (VarBind(lx, ds.ty.left),) + suffix),
                 "Case left premise context")
            need(dr.ctx == Ctx(d.ctx.entries[:k] + (VarBind(rx, ds.ty.right),) + suffix),
                 "Case right premise context")
            need(dl.term == lbody and dr.term == rbody, "Case premise terms")
            need(dl.ty == d.ty and dr.ty == d.ty, "Case branch types")
        case "Abort", Abort(ty, body):
            (db,) = _need_children(d, 1)
            k = d.split
            need(k is not None and 0 <= k <= len(d.ctx), "Abort split out of range")
            need(db.ctx == d.ctx.prefix(k) and db.term == body, "Abort premise")
            need(db.ty == Empty(), "Abort premise type")
            need(d.ty == ty, "Abort conclusion type")
        case "Shut", Shut(body):
            (db,) = _need_children(d, 1)
            need(db.ctx == d.ctx.extend(Lock()) and db.term == body, "Shut premise")
            need(d.ty == Box(db.ty), "Shut conclusion type")
        case "Open", Open(body):
            (db,) = _need_children(d, 1)
            k = d.split
            need(k is not None and 0 <= k <= len(d.ctx), "Open split out of range")
            _need_lock_policy(d, k, need)
            need(db.ctx == d.ctx.prefix(k) and db.term == body, "Open premise")
            need(db.ty == Box(d.ty), "Open types")
        case "DiaIntro", DiaIntro(body):
            need(mode.dia_enabled, "dia disabled in this mode")
            (db,) = _need_children(d, 1)
            k = d.split
            need(k is not None and 0 <= k <= len(d.ctx), "DiaIntro split out of range")
            _need_lock_policy(d, k, need)
            need(db.ctx == d.ctx.prefix(k) and db.term == body, "DiaIntro premise")
            need(d.ty == Dia(db.ty), "DiaIntro type")
        case "LetDia", LetDia(x, ty, scrut, body):
            need(mode.dia_enabled, "dia disabled in this mode")
            need(len(d.children) == 2, "LetDia has two premises")
            ds, db = d.children
            need(ds.ctx == d.ctx and ds.term == scrut, "LetDia scrutinee premise")
            need(ds.ty == Dia(ty), "LetDia scrutinee type")
            need(db.ctx == Ctx((VarBind(x, ty), Lock())), "LetDia body context")
            need(db.term == body, "LetDia body term")
            need(db.ty == d.ty, "LetDia conclusion type")
        case _:
            raise InvalidDerivation(
                f"rule {d.rule} does not match term `{print_term(d.term)}`")

    for c in d.children:
        validate_derivation(c)


def _need_children(d: Derivation, n: int) -> tuple[Derivation, ...]:
    if len(d.children) != n:
        raise InvalidDerivation(f"{d.rule} needs {n} premises")
    return d.children


def _need_lock_policy(d: Derivation, k: int, need) -> None:
    # IK: the entry at the split is a lock and no lock occurs to its right.
    # IS4: the split may fall anywhere. IR: the entry at the split is a lock.
    cal = d.mode.calculus
    if cal in ("IK", "IR"):
        need(k < len(d.ctx) and isinstance(d.ctx[k], Lock), "split entry is not a lock")
    if cal == "IK":
        need(not any(isinstance(e, Lock) for e in d.ctx.entries[k + 1:]),
             "lock to the right of the split")


# ---------------------------------------------------------------------------
# Derivation enumeration

def enumerate_derivations(mode: Mode, ctx: Ctx, t: Term, ty: Ty,
                          bound: int = 64) -> list[Derivation]:
    """All derivations of ctx |- t : ty that differ in split choices,
    deduplicated by split vectors. Raises BoundExceeded if there are
    more than `bound`."""
    check(mode, ctx, t, ty)  # precondition: the judgment holds at all
    out: list[Derivation] = []
    seen: set[tuple] = set()
    for d in _enum(mode, ctx, t):
        if d.ty != ty:
            continue
        vec = d.split_vector()
        if vec in seen:
            continue
        seen.add(vec)
        out.append(d)
        if len(out) > bound:
            raise BoundExceeded(f"more than {bound} derivations")
    return out


def _enum(mode: Mode, ctx: Ctx, t: Term):
    """Yield every schema-valid derivation of some type for t in ctx."""
    match t:
        case Var(x):
            hit = ctx.lookup(x)
            if hit is None:
                return
            i, ty = hit
            if mode.calculus in ("IK", "IS4") and any(
                    isinstance(e, Lock) for e in ctx.entries[i + 1:]):
                return
            yield Derivation("Var", mode, ctx, t, ty, i, ())
        case Lam(x, ty, body):
            x, body = _rename_binder(x, body, ctx)
            for sub in _enum(mode, ctx.extend(VarBind(x, ty)), body):
                yield Derivation("Lam", mode, ctx, Lam(x, ty, sub.term),
                                 Fun(ty, sub.ty), None, (sub,))
        case App(fn, arg):
            for dfn in _enum(mode, ctx, fn):
                if not isinstance(dfn.ty, Fun):
                    continue
                for darg in _enum(mode, ctx, arg):
                    if darg.ty == dfn.ty.arg:
                        yield Derivation("App", mode, ctx, App(dfn.term, darg.term),
                                         dfn.ty.res, None, (dfn, darg))
        case UnitIntro():
            yield Derivation("Unit", mode, ctx, t, Unit(), None, ())
        case Pair(a, b):
            for da in _enum(mode, ctx, a):
                for db in _enum(mode, ctx, b):
                    yield Derivation("Pair", mode, ctx, Pair(da.term, db.term),
                                     Prod(da.ty, db.ty), None, (da, db))
        case Proj1(body):
            for db in _enum(mode, ctx, body):
                if isinstance(db.ty, Prod):
                    yield Derivation("Proj1", mode, ctx, Proj1(db.term),
                                     db.ty.left, None, (db,))
        case Proj2(body):
            for db in _enum(mode, ctx, body):
                if isinstance(db.ty, Prod):
                    yield Derivation("Proj2", mode, ctx, Proj2(db.term),
                                     db.ty.right, None, (db,))
        case Inl(rty, body):
            for db in _enum(mode, ctx, body):
                yield Derivation("Inl", mode, ctx, Inl(rty, db.term),
                                 Sum(db.ty, rty), None, (db,))
        case Inr(lty, body):
            for db in _enum(mode, ctx, body):
                yield Derivation("Inr", mode, ctx, Inr(lty, db.term),
                                 Sum(lty, db.ty), None, (db,))
        case Case(scrut, lx, lbody, rx, rbody):
            lx, lbody = _rename_binder(lx, lbody, ctx)
            rx, rbody = _rename_binder(rx, rbody, ctx)
            for k in range(len(ctx) + 1):
                for ds in _enum(mode, ctx.prefix(k), scrut):
                    if not isinstance(ds.ty, Sum):
                        continue
                    suffix = ctx.entries[k:]
                    lctx = Ctx(ctx.entries[:k] + (VarBind(lx, ds.ty.left),) + suffix)
                    rctx = Ctx(ctx.entries[:k] + (VarBind(rx, ds.ty.right),) + suffix)
                    for dl in _enum(mode, lctx, lbody):
                        for dr in _enum(mode, rctx, rbody):
                            if dl.ty == dr.ty:
                                yield Derivation(
                                    "Case", mode, ctx,
                                    Case(ds.term, lx, dl.term, rx, dr.term),
                                    dl.ty, k, (ds, dl, dr))
        case Abort(ty, body):
            for k in range(len(ctx) + 1):
                for db in _enum(mode, ctx.prefix(k), body):
                    if db.ty == Empty():
                        yield Derivation("Abort", mode, ctx, Abort(ty, db.term),
                                         ty, k, (db,))
        case Shut(body):
            for db in _enum(mode, ctx.extend(Lock()), body):
                yield Derivation("Shut", mode, ctx, Shut(db.term), Box(db.ty), None, (db,))
        case Open(body):
            for k in _enum_splits(mode, ctx):
                for db in _enum(mode, ctx.prefix(k), body):
                    if isinstance(db.ty, Box):
                        yield Derivation("Open", mode, ctx, Open(db.term),
                                         db.ty.body, k, (db,))
        case DiaIntro(body):
            if not mode.dia_enabled:
                return
            for k in _enum_splits(mode, ctx):
                for db in _enum(mode, ctx.prefix(k), body):
                    yield Derivation("DiaIntro", mode, ctx, DiaIntro(db.term),
                                     Dia(db.ty), k, (db,))
        case LetDia(x, ty, scrut, body):
            if not mode.dia_enabled or (free_vars(body) - {x}):
                return
            bctx = Ctx((VarBind(x, ty), Lock()))
            for ds in _enum(mode, ctx, scrut):
                if ds.ty != Dia(ty):
                    continue
                for db in _enum(mode, bctx, body):
                    yield Derivation("LetDia", mode, ctx,
                                     LetDia(x, ty, ds.term, db.term),
                                     db.ty, None, (ds, db))


def _enum_splits(mode: Mode, ctx: Ctx):
    if mode.calculus == "IK":
        locks = ctx.lock_positions()
        return locks[-1:]  # rightmost lock or nothing
    if mode.calculus == "IS4":
        return range(len(ctx) + 1)
    return tuple(reversed(ctx.lock_positions()))  # IR


# ---------------------------------------------------------------------------
# Reporting

def format_derivation(d: Derivation, indent: int = 0) -> str:
    from .surface import print_ctx  # local import to avoid cycle at module load
    pad = "  " * indent
    split = f" [split={d.split}]" if d.split is not None else ""
    line = (f"{pad}{d.rule}{split}  {print_ctx(d.ctx)} |- "
            f"{print_term(d.term)} : {print_type(d.ty)}")
    return "\n".join([line] + [format_derivation(c, indent + 1) for c in d.children])
