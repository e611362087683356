"""Abstract syntax: types, terms, contexts, modes.

Terms carry the annotations (on lambda, injections, abort and let-dia
binders) that make type inference syntax-directed. All values are
immutable; nothing here mutates shared state, so everything is safe to
use from concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field


# ---------------------------------------------------------------------------
# Types

class Ty:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Base(Ty):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("base type needs a nonempty name")


@dataclass(frozen=True, slots=True)
class Unit(Ty):
    pass


@dataclass(frozen=True, slots=True)
class Empty(Ty):
    pass


@dataclass(frozen=True, slots=True)
class Prod(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Sum(Ty):
    left: Ty
    right: Ty


@dataclass(frozen=True, slots=True)
class Fun(Ty):
    arg: Ty
    res: Ty


@dataclass(frozen=True, slots=True)
class Box(Ty):
    body: Ty


@dataclass(frozen=True, slots=True)
class Dia(Ty):
    body: Ty


def ty_children(ty: Ty) -> tuple[Ty, ...]:
    match ty:
        case Prod(a, b) | Sum(a, b) | Fun(a, b):
            return (a, b)
        case Box(a) | Dia(a):
            return (a,)
        case _:
            return ()


def is_subformula(a: Ty, b: Ty) -> bool:
    """Reflexive-transitive closure of the immediate-constituent relation."""
    if a == b:
        return True
    return any(is_subformula(a, c) for c in ty_children(b))


def ty_size(ty: Ty) -> int:
    return 1 + sum(ty_size(c) for c in ty_children(ty))


# ---------------------------------------------------------------------------
# Terms

class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Lam(Term):
    name: str
    ty: Ty
    body: Term


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class UnitIntro(Term):
    pass


@dataclass(frozen=True, slots=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Proj1(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Proj2(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Inl(Term):
    right_ty: Ty  # the absent summand, so inl t : ty(t) + right_ty
    body: Term


@dataclass(frozen=True, slots=True)
class Inr(Term):
    left_ty: Ty
    body: Term


@dataclass(frozen=True, slots=True)
class Case(Term):
    scrut: Term
    left_name: str
    left: Term
    right_name: str
    right: Term


@dataclass(frozen=True, slots=True)
class Abort(Term):
    ty: Ty  # result type
    body: Term


@dataclass(frozen=True, slots=True)
class Shut(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class Open(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class DiaIntro(Term):
    body: Term


@dataclass(frozen=True, slots=True)
class LetDia(Term):
    name: str
    ty: Ty  # type of the bound variable
    scrut: Term
    body: Term


def term_size(t: Term) -> int:
    match t:
        case Var() | UnitIntro():
            return 1
        case Lam(_, _, b) | Proj1(b) | Proj2(b) | Inl(_, b) | Inr(_, b) \
                | Abort(_, b) | Shut(b) | Open(b) | DiaIntro(b):
            return 1 + term_size(b)
        case App(f, a):
            return 1 + term_size(f) + term_size(a)
        case Pair(a, b):
            return 1 + term_size(a) + term_size(b)
        case Case(s, _, l, _, r):
            return 1 + term_size(s) + term_size(l) + term_size(r)
        case LetDia(_, _, s, b):
            return 1 + term_size(s) + term_size(b)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Contexts

@dataclass(frozen=True, slots=True)
class VarBind:
    name: str
    ty: Ty


@dataclass(frozen=True, slots=True)
class Lock:
    pass


CtxEntry = VarBind | Lock


@dataclass(frozen=True, slots=True)
class Ctx:
    """Ordered context; the rightmost entry is the most recent."""

    entries: tuple[CtxEntry, ...] = ()

    def __post_init__(self):
        names = [e.name for e in self.entries if isinstance(e, VarBind)]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate variable in context: {names}")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def extend(self, *entries: CtxEntry) -> "Ctx":
        return Ctx(self.entries + entries)

    def prefix(self, k: int) -> "Ctx":
        return Ctx(self.entries[:k])

    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries if isinstance(e, VarBind))

    def lookup(self, name: str) -> tuple[int, Ty] | None:
        for i, e in enumerate(self.entries):
            if isinstance(e, VarBind) and e.name == name:
                return i, e.ty
        return None

    def lock_positions(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.entries) if isinstance(e, Lock))


# ---------------------------------------------------------------------------
# Modes

@dataclass(frozen=True, slots=True)
class Mode:
    calculus: str  # "IK" | "IS4" | "IR"
    dia_enabled: bool = False

    def __post_init__(self):
        if self.calculus not in ("IK", "IS4", "IR"):
            raise ValueError(f"unknown calculus {self.calculus!r}")


IK = Mode("IK", dia_enabled=False)
IK_DIA = Mode("IK", dia_enabled=True)
IS4 = Mode("IS4", dia_enabled=False)
IS4_DIA = Mode("IS4", dia_enabled=True)
IR = Mode("IR", dia_enabled=True)
IR_BOX = Mode("IR", dia_enabled=False)

MODE_NAMES = {
    "ik": IK,
    "ik_dia": IK_DIA,
    "is4": IS4,
    "is4_dia": IS4_DIA,
    "ir": IR,
    "ir_box": IR_BOX,
}


def mode_named(name: str) -> Mode:
    key = name.strip().lower().replace("-", "_")
    if key not in MODE_NAMES:
        raise ValueError(f"unknown mode {name!r} (expected one of {sorted(MODE_NAMES)})")
    return MODE_NAMES[key]


def mode_name(mode: Mode) -> str:
    for k, v in MODE_NAMES.items():
        if v == mode:
            return k
    raise ValueError(f"unnamed mode {mode!r}")


# ---------------------------------------------------------------------------
# Free variables, substitution, alpha-equivalence

def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(x):
            return frozenset((x,))
        case UnitIntro():
            return frozenset()
        case Lam(x, _, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Pair(a, b):
            return free_vars(a) | free_vars(b)
        case Proj1(b) | Proj2(b) | Inl(_, b) | Inr(_, b) | Abort(_, b) \
                | Shut(b) | Open(b) | DiaIntro(b):
            return free_vars(b)
        case Case(s, x, l, y, r):
            return free_vars(s) | (free_vars(l) - {x}) | (free_vars(r) - {y})
        case LetDia(x, _, s, b):
            return free_vars(s) | (free_vars(b) - {x})
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid) -> str:
    """Deterministic fresh name: prime-suffix the base until it avoids the set."""
    name = base
    while name in avoid:
        name += "'"
    return name


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding substitution of u for free occurrences of x in t.

    Subterms without free occurrences of x are returned unchanged (same
    object), so substitution never disturbs untouched binders.
    """
    fvu = free_vars(u)

    def go(t: Term, bound: frozenset[str]) -> Term:
        if x not in free_vars(t):
            return t
        match t:
            case Var(y):
                return u if y == x else t
            case UnitIntro():
                return t
            case Lam(y, ty, b):
                if y == x:
                    return t
                y2, b2 = _freshen_binder(y, b, x, fvu)
                return Lam(y2, ty, go(b2, bound | {y2}))
            case App(f, a):
                return App(go(f, bound), go(a, bound))
            case Pair(a, b):
                return Pair(go(a, bound), go(b, bound))
            case Proj1(b):
                return Proj1(go(b, bound))
            case Proj2(b):
                return Proj2(go(b, bound))
            case Inl(ty, b):
                return Inl(ty, go(b, bound))
            case Inr(ty, b):
                return Inr(ty, go(b, bound))
            case Abort(ty, b):
                return Abort(ty, go(b, bound))
            case Shut(b):
                return Shut(go(b, bound))
            case Open(b):
                return Open(go(b, bound))
            case DiaIntro(b):
                return DiaIntro(go(b, bound))
            case Case(s, y, l, z, r):
                s2 = go(s, bound)
                if y == x:
                    l2 = l
                else:
                    y, l = _freshen_binder(y, l, x, fvu)
                    l2 = go(l, bound | {y})
                if z == x:
                    r2 = r
                else:
                    z, r = _freshen_binder(z, r, x, fvu)
                    r2 = go(r, bound | {z})
                return Case(s2, y, l2, z, r2)
            case LetDia(y, ty, s, b):
                s2 = go(s, bound)
                if y == x:
                    return LetDia(y, ty, s2, b)
                y2, b2 = _freshen_binder(y, b, x, fvu)
                return LetDia(y2, ty, s2, go(b2, bound | {y2}))
        raise TypeError(f"not a term: {t!r}")

    return go(t, frozenset())


def _freshen_binder(y: str, body: Term, x: str, fvu: frozenset[str]) -> tuple[str, Term]:
    # Rename y only when u would be captured; the choice is deterministic.
    if y not in fvu:
        return y, body
    y2 = fresh_name(y, fvu | free_vars(body) | {x})
    return y2, subst(body, y, Var(y2))


def rename_var(t: Term, old: str, new: str) -> Term:
    """Rename a free variable (new must itself be fresh for t)."""
    return subst(t, old, Var(new))


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""

    def go(a: Term, b: Term, env1: dict[str, int], env2: dict[str, int], depth: int) -> bool:
        match a, b:
            case Var(x), Var(y):
                dx, dy = env1.get(x), env2.get(y)
                return (x == y) if dx is None and dy is None else dx == dy
            case UnitIntro(), UnitIntro():
                return True
            case Lam(x, tx, bx), Lam(y, ty, by):
                return tx == ty and go(bx, by, env1 | {x: depth}, env2 | {y: depth}, depth + 1)
            case App(f1, a1), App(f2, a2):
                return go(f1, f2, env1, env2, depth) and go(a1, a2, env1, env2, depth)
            case Pair(a1, b1), Pair(a2, b2):
                return go(a1, a2, env1, env2, depth) and go(b1, b2, env1, env2, depth)
            case Proj1(b1), Proj1(b2):
                return go(b1, b2, env1, env2, depth)
            case Proj2(b1), Proj2(b2):
                return go(b1, b2, env1, env2, depth)
            case Inl(t1_, b1), Inl(t2_, b2):
                return t1_ == t2_ and go(b1, b2, env1, env2, depth)
            case Inr(t1_, b1), Inr(t2_, b2):
                return t1_ == t2_ and go(b1, b2, env1, env2, depth)
            case Abort(t1_, b1), Abort(t2_, b2):
                return t1_ == t2_ and go(b1, b2, env1, env2, depth)
            case Shut(b1), Shut(b2):
                return go(b1, b2, env1, env2, depth)
            case Open(b1), Open(b2):
                return go(b1, b2, env1, env2, depth)
            case DiaIntro(b1), DiaIntro(b2):
                return go(b1, b2, env1, env2, depth)
            case Case(s1, x1, l1, y1, r1), Case(s2, x2, l2, y2, r2):
                return (go(s1, s2, env1, env2, depth)
                        and go(l1, l2, env1 | {x1: depth}, env2 | {x2: depth}, depth + 1)
                        and go(r1, r2, env1 | {y1: depth}, env2 | {y2: depth}, depth + 1))
            case LetDia(x1, t1_, s1, b1), LetDia(x2, t2_, s2, b2):
                return (t1_ == t2_ and go(s1, s2, env1, env2, depth)
                        and go(b1, b2, env1 | {x1: depth}, env2 | {x2: depth}, depth + 1))
            case _:
                return False

    return go(t1, t2, {}, {}, 0)


# ---------------------------------------------------------------------------
# Sequent-to-formula translation

def formula_translation(ctx: Ctx, ty: Ty) -> Ty:
    """Read a sequent as a modal formula, consuming the context left to right:
    a variable entry becomes an implication, a lock becomes a box."""
    result = ty
    for entry in reversed(ctx.entries):
        if isinstance(entry, VarBind):
            result = Fun(entry.ty, result)
        else:
            result = Box(result)
    return result
