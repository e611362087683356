"""Reduction and definitional equality.

`step` is untyped leftmost-outermost beta plus the two commuting
conversions that push `open` through case/abort. Eta for box/dia and the
let-dia associativity law are *not* reductions here: eta needs typing
information (the contractum must already have the box type in the
ambient context) and associativity cannot be oriented, so both live only
in `eta_step` and the bounded `def_eq` search.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .syntax import (
    Abort, App, Box, Case, Ctx, Dia, DiaIntro, Fun, Inl, Inr, Lam, LetDia,
    Mode, Open, Pair, Prod, Proj1, Proj2, Shut, Sum, Term, Ty, UnitIntro,
    Var, alpha_eq, free_vars, fresh_name, subst, term_size,
)
from .typecheck import Derivation, TypecheckError, check, infer
from .surface import print_term


class RedexTag(enum.Enum):
    BetaFun = "beta-fun"
    BetaPair1 = "beta-pair1"
    BetaPair2 = "beta-pair2"
    BetaCase1 = "beta-case1"
    BetaCase2 = "beta-case2"
    BetaBox = "beta-box"
    BetaDia = "beta-dia"
    CCOpenCase = "cc-open-case"
    CCOpenAbort = "cc-open-abort"


class FuelExhausted(Exception):
    pass


@dataclass(frozen=True, slots=True)
class Fuel:
    remaining: int

    def __post_init__(self):
        if self.remaining < 0:
            raise ValueError("fuel must be non-negative")

    @classmethod
    def default_for(cls, t: Term) -> "Fuel":
        return cls(10 * term_size(t) ** 2)


# ---------------------------------------------------------------------------
# Generic term traversal

def term_children(t: Term) -> tuple[Term, ...]:
    match t:
        case Var() | UnitIntro():
            return ()
        case Lam(_, _, b) | Proj1(b) | Proj2(b) | Inl(_, b) | Inr(_, b) \
                | Abort(_, b) | Shut(b) | Open(b) | DiaIntro(b):
            return (b,)
        case App(f, a):
            return (f, a)
        case Pair(a, b):
            return (a, b)
        case Case(s, _, l, _, r):
            return (s, l, r)
        case LetDia(_, _, s, b):
            return (s, b)
    raise TypeError(f"not a term: {t!r}")


def with_children(t: Term, kids: tuple[Term, ...]) -> Term:
    match t:
        case Var() | UnitIntro():
            return t
        case Lam(x, ty, _):
            return Lam(x, ty, kids[0])
        case Proj1(_):
            return Proj1(kids[0])
        case Proj2(_):
            return Proj2(kids[0])
        case Inl(ty, _):
            return Inl(ty, kids[0])
        case Inr(ty, _):
            return Inr(ty, kids[0])
        case Abort(ty, _):
            return Abort(ty, kids[0])
        case Shut(_):
            return Shut(kids[0])
        case Open(_):
            return Open(kids[0])
        case DiaIntro(_):
            return DiaIntro(kids[0])
        case App(_, _):
            return App(kids[0], kids[1])
        case Pair(_, _):
            return Pair(kids[0], kids[1])
        case Case(_, x, _, y, _):
            return Case(kids[0], x, kids[1], y, kids[2])
        case LetDia(x, ty, _, _):
            return LetDia(x, ty, kids[0], kids[1])
    raise TypeError(f"not a term: {t!r}")


def child_binders(t: Term, i: int) -> frozenset[str]:
    match t:
        case Lam(x, _, _):
            return frozenset((x,))
        case Case(_, x, _, y, _):
            if i == 1:
                return frozenset((x,))
            if i == 2:
                return frozenset((y,))
        case LetDia(x, _, _, _):
            if i == 1:
                return frozenset((x,))
    return frozenset()


def subterm_positions(t: Term):
    """Pre-order (position, subterm) pairs; a position is a child-index path."""
    stack = [((), t)]
    while stack:
        pos, sub = stack.pop()
        yield pos, sub
        kids = term_children(sub)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((pos + (i,), kids[i]))


def subterm_at(t: Term, pos: tuple[int, ...]) -> Term:
    for i in pos:
        t = term_children(t)[i]
    return t


def replace_at(t: Term, pos: tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    kids = list(term_children(t))
    kids[pos[0]] = replace_at(kids[pos[0]], pos[1:], new)
    return with_children(t, tuple(kids))


def binders_above(t: Term, pos: tuple[int, ...]) -> frozenset[str]:
    names: frozenset[str] = frozenset()
    for i in pos:
        names |= child_binders(t, i)
        t = term_children(t)[i]
    return names


def alpha_key(t: Term):
    """Hashable canonical form: alpha_eq(a, b) iff alpha_key(a) == alpha_key(b)."""

    def go(t: Term, env: dict[str, int], depth: int):
        match t:
            case Var(x):
                return ("v", env.get(x, x))
            case UnitIntro():
                return ("u",)
            case Lam(x, ty, b):
                return ("lam", ty, go(b, env | {x: depth}, depth + 1))
            case App(f, a):
                return ("app", go(f, env, depth), go(a, env, depth))
            case Pair(a, b):
                return ("pair", go(a, env, depth), go(b, env, depth))
            case Proj1(b):
                return ("p1", go(b, env, depth))
            case Proj2(b):
                return ("p2", go(b, env, depth))
            case Inl(ty, b):
                return ("inl", ty, go(b, env, depth))
            case Inr(ty, b):
                return ("inr", ty, go(b, env, depth))
            case Abort(ty, b):
                return ("abort", ty, go(b, env, depth))
            case Shut(b):
                return ("shut", go(b, env, depth))
            case Open(b):
                return ("open", go(b, env, depth))
            case DiaIntro(b):
                return ("dia", go(b, env, depth))
            case Case(s, x, l, y, r):
                return ("case", go(s, env, depth),
                        go(l, env | {x: depth}, depth + 1),
                        go(r, env | {y: depth}, depth + 1))
            case LetDia(x, ty, s, b):
                return ("letd", ty, go(s, env, depth),
                        go(b, env | {x: depth}, depth + 1))
        raise TypeError(f"not a term: {t!r}")

    return go(t, {}, 0)


# ---------------------------------------------------------------------------
# Small-step reduction

def _root_redex(t: Term) -> tuple[Term, RedexTag] | None:
    match t:
        case App(Lam(x, _, body), arg):
            return subst(body, x, arg), RedexTag.BetaFun
        case Proj1(Pair(a, _)):
            return a, RedexTag.BetaPair1
        case Proj2(Pair(_, b)):
            return b, RedexTag.BetaPair2
        case Case(Inl(_, s), x, l, _, _):
            return subst(l, x, s), RedexTag.BetaCase1
        case Case(Inr(_, s), _, _, y, r):
            return subst(r, y, s), RedexTag.BetaCase2
        case Open(Shut(body)):
            return body, RedexTag.BetaBox
        case LetDia(x, _, DiaIntro(s), body):
            return subst(body, x, s), RedexTag.BetaDia
        case Open(Case(s, x, l, y, r)):
            return Case(s, x, Open(l), y, Open(r)), RedexTag.CCOpenCase
        case Open(Abort(Box(inner), body)):
            # On typed terms the annotation is necessarily a box type.
            return Abort(inner, body), RedexTag.CCOpenAbort
    return None


def step(t: Term) -> tuple[Term, RedexTag] | None:
    """Contract the leftmost-outermost redex; None iff t is normal."""
    hit = _root_redex(t)
    if hit is not None:
        return hit
    kids = term_children(t)
    for i, kid in enumerate(kids):
        sub = step(kid)
        if sub is not None:
            new_kids = kids[:i] + (sub[0],) + kids[i + 1:]
            return with_children(t, new_kids), sub[1]
    return None


def step_innermost(t: Term) -> tuple[Term, RedexTag] | None:
    """Contract the leftmost-innermost redex (used for confluence sampling)."""
    kids = term_children(t)
    for i, kid in enumerate(kids):
        sub = step_innermost(kid)
        if sub is not None:
            new_kids = kids[:i] + (sub[0],) + kids[i + 1:]
            return with_children(t, new_kids), sub[1]
    return _root_redex(t)


def is_normal(t: Term) -> bool:
    return step(t) is None


def _run(t: Term, fuel, stepper) -> tuple[Term, int, list[RedexTag]]:
    if fuel is None:
        fuel = Fuel.default_for(t)
    if isinstance(fuel, int):
        fuel = Fuel(fuel)
    remaining = fuel.remaining
    steps = 0
    tags: list[RedexTag] = []
    while True:
        hit = stepper(t)
        if hit is None:
            return t, steps, tags
        if remaining == 0:
            raise FuelExhausted(
                f"no normal form within {fuel.remaining} contractions "
                f"(stuck at `{print_term(t)}`)")
        t, tag = hit
        tags.append(tag)
        remaining -= 1
        steps += 1


def normalize(t: Term, fuel: Fuel | int | None = None) -> tuple[Term, int]:
    """Leftmost-outermost normal form and the number of contractions."""
    nf, steps, _ = _run(t, fuel, step)
    return nf, steps


def normalize_trace(t: Term, fuel: Fuel | int | None = None) -> tuple[Term, list[RedexTag]]:
    nf, _, tags = _run(t, fuel, step)
    return nf, tags


def normalize_innermost(t: Term, fuel: Fuel | int | None = None) -> tuple[Term, int]:
    nf, steps, _ = _run(t, fuel, step_innermost)
    return nf, steps


def trace_terms(t: Term, fuel: Fuel | int | None = None) -> list[tuple[Term, RedexTag]]:
    """The successive contracta of the normalization trace of t."""
    out = []
    budget = Fuel.default_for(t).remaining if fuel is None else (
        fuel.remaining if isinstance(fuel, Fuel) else fuel)
    while True:
        hit = step(t)
        if hit is None:
            return out
        if budget == 0:
            raise FuelExhausted(f"trace exceeds fuel (at `{print_term(t)}`)")
        t, tag = hit
        budget -= 1
        out.append((t, tag))


# ---------------------------------------------------------------------------
# Typed eta

def _eta_contractum(node_term: Term) -> Term | None:
    match node_term:
        case Shut(Open(body)):
            return body
        case LetDia(x, _, scrut, DiaIntro(Var(y))) if y == x:
            return scrut
    return None


def eta_step(deriv: Derivation) -> Derivation | None:
    """Contract one type-directed eta redex (leftmost-outermost) and
    re-check; None when no redex contracts.

    shut (open t) contracts only when t has the box type in the ambient
    context at that node, which in IS4 is exactly the coherence-backed
    form of the typed eta rule; the let-dia eta needs no side condition.
    """
    root = deriv
    for pos, node in _deriv_positions(deriv):
        contractum = _eta_contractum(node.term)
        if contractum is None:
            continue
        if isinstance(node.term, Shut):
            # Proviso: the body must already have the box type here.
            try:
                got, _ = infer(node.mode, node.ctx, contractum)
            except TypecheckError:
                continue
            if got != node.ty:
                continue
        candidate = replace_at(root.term, pos, contractum)
        try:
            return check(root.mode, root.ctx, candidate, root.ty)
        except TypecheckError:
            continue
    return None


def eta_normalize(deriv: Derivation, max_steps: int = 1000) -> Derivation:
    for _ in range(max_steps):
        nxt = eta_step(deriv)
        if nxt is None:
            return deriv
        deriv = nxt
    raise FuelExhausted("eta reduction did not terminate")


def _deriv_positions(d: Derivation, pos: tuple[int, ...] = ()):
    """Derivation nodes with their term positions (they coincide because
    derivation children mirror term children)."""
    yield pos, d
    for i, c in enumerate(d.children):
        yield from _deriv_positions(c, pos + (i,))


# ---------------------------------------------------------------------------
# Candidate moves for def_eq and for the soundness suites

def eta_contract_candidates(deriv: Derivation) -> list[tuple[Term, str]]:
    out = []
    root = deriv.term
    for pos, node in _deriv_positions(deriv):
        contractum = _eta_contractum(node.term)
        if contractum is None:
            continue
        if isinstance(node.term, Shut):
            try:
                got, _ = infer(node.mode, node.ctx, contractum)
            except TypecheckError:
                continue
            if got != node.ty:
                continue
        out.append((replace_at(root, pos, contractum), f"eta-contract@{pos}"))
    return out


def eta_expand_candidates(deriv: Derivation) -> list[tuple[Term, str]]:
    out = []
    root = deriv.term
    for pos, node in _deriv_positions(deriv):
        if isinstance(node.ty, Box):
            out.append((replace_at(root, pos, Shut(Open(node.term))),
                        f"eta-expand-box@{pos}"))
        elif isinstance(node.ty, Dia) and node.mode.dia_enabled:
            x = fresh_name("e", free_vars(node.term))
            expanded = LetDia(x, node.ty.body, node.term, DiaIntro(Var(x)))
            out.append((replace_at(root, pos, expanded), f"eta-expand-dia@{pos}"))
    return out


def assoc_candidates(t: Term) -> list[tuple[Term, str]]:
    """Both orientations of  letd x<-s in (t[u/y])  =  t[letd x<-s in u/y],
    matched at single occurrences of u. Candidates are purely syntactic;
    callers must re-check them."""
    out = []
    for pos, sub in subterm_positions(t):
        # Sink: this letd node's body is read as t[u/y] for a subterm u
        # holding every occurrence of the bound variable.
        if isinstance(sub, LetDia):
            x, ann, scrut, body = sub.name, sub.ty, sub.scrut, sub.body
            for q, u in subterm_positions(body):
                if not q:
                    continue  # u = whole body makes the rewrite the identity
                if not (free_vars(u) <= {x}):
                    continue
                if binders_above(body, q) & free_vars(u):
                    continue  # that x is a shadowing binder's, not ours
                y = fresh_name("a", free_vars(body) | {x})
                tt = replace_at(body, q, Var(y))
                if not (free_vars(tt) <= {y}):
                    continue  # an occurrence of x survives outside u
                inner = LetDia(x, ann, scrut, u)
                out.append((replace_at(t, pos, subst(tt, y, inner)),
                            f"assoc-sink@{pos}"))
        # Hoist: some descendant is a letd; pull it up to this node.
        for q, inner in subterm_positions(sub):
            if not q or not isinstance(inner, LetDia):
                continue
            path_binders = binders_above(sub, q)
            if free_vars(inner) & path_binders:
                continue  # the letd would escape a binder on the path
            if (free_vars(inner.body) | {inner.name}) & path_binders:
                continue  # its body's variable would get re-captured
            y = fresh_name("a", free_vars(sub))
            tt = replace_at(sub, q, Var(y))
            if not (free_vars(tt) <= {y}):
                continue
            new_body = replace_at(sub, q, inner.body)
            hoisted = LetDia(inner.name, inner.ty, inner.scrut, new_body)
            out.append((replace_at(t, pos, hoisted), f"assoc-hoist@{pos}"))
    return out


# ---------------------------------------------------------------------------
# Definitional equality

class IllTyped(Exception):
    pass


@dataclass(frozen=True)
class Equal:
    trace: tuple[str, ...]


@dataclass(frozen=True)
class Distinct:
    lhs_normal: Term
    rhs_normal: Term


@dataclass(frozen=True)
class Unknown:
    pass


Verdict = Equal | Distinct | Unknown


def def_eq(mode: Mode, ctx: Ctx, t1: Term, t2: Term, ty: Ty,
           search_bound: int = 32) -> Verdict:
    """Bounded semi-decision of definitional equivalence (beta + cc +
    eta for box/dia + let-dia associativity).

    Both sides are beta/cc-normalized, then a bidirectional breadth-first
    search applies eta steps (both directions) and associativity (both
    directions); `search_bound` caps the number of terms expanded per
    side. Distinct is only claimed for fully eta-normal let-dia-free
    normal forms, so it is never asserted where associativity might
    still apply; everything else falls back to Unknown.
    """
    try:
        check(mode, ctx, t1, ty)
        check(mode, ctx, t2, ty)
    except TypecheckError as exc:
        raise IllTyped(str(exc)) from exc

    n1, s1 = normalize(t1)
    n2, s2 = normalize(t2)
    base_trace = (f"lhs beta/cc-normalizes in {s1} steps to `{print_term(n1)}`",
                  f"rhs beta/cc-normalizes in {s2} steps to `{print_term(n2)}`")
    if alpha_eq(n1, n2):
        return Equal(base_trace + ("normal forms agree",))

    sides = [_Search(mode, ctx, ty, n1), _Search(mode, ctx, ty, n2)]
    for round_ in range(search_bound):
        progressed = False
        for me, other in ((0, 1), (1, 0)):
            hit = sides[me].expand_one(sides[other])
            if hit is not None:
                trace = base_trace + sides[me].path_to(hit) + \
                    tuple(reversed(sides[other].path_to(hit)))
                return Equal(trace)
            progressed = progressed or sides[me].frontier
        if not progressed:
            break

    if _fully_eta_normal(mode, ctx, n1, ty) and _fully_eta_normal(mode, ctx, n2, ty) \
            and not _contains_letdia(n1) and not _contains_letdia(n2):
        return Distinct(n1, n2)
    return Unknown()


def _contains_letdia(t: Term) -> bool:
    return any(isinstance(sub, LetDia) for _, sub in subterm_positions(t))


def _fully_eta_normal(mode: Mode, ctx: Ctx, t: Term, ty: Ty) -> bool:
    deriv = check(mode, ctx, t, ty)
    return not eta_contract_candidates(deriv)


class _Search:
    def __init__(self, mode: Mode, ctx: Ctx, ty: Ty, start: Term):
        self.mode = mode
        self.ctx = ctx
        self.ty = ty
        key = alpha_key(start)
        self.visited: dict = {key: (start, None, "start")}
        self.frontier: list = [key]

    def expand_one(self, other: "_Search"):
        if not self.frontier:
            return None
        key = self.frontier.pop(0)
        term, _, _ = self.visited[key]
        for cand, label in self._moves(term):
            try:
                nf, _ = normalize(cand)
            except FuelExhausted:
                continue
            ck = alpha_key(nf)
            if ck in self.visited:
                continue
            try:
                check(self.mode, self.ctx, nf, self.ty)
            except TypecheckError:
                continue
            self.visited[ck] = (nf, key, label)
            self.frontier.append(ck)
            if ck in other.visited:
                return ck
        return None

    def _moves(self, term: Term):
        try:
            deriv = check(self.mode, self.ctx, term, self.ty)
        except TypecheckError:
            return []
        moves = eta_contract_candidates(deriv)
        moves += assoc_candidates(term)
        moves += eta_expand_candidates(deriv)
        return moves

    def path_to(self, key) -> tuple[str, ...]:
        out = []
        while key is not None:
            term, parent, label = self.visited[key]
            out.append(f"{label}: `{print_term(term)}`")
            key = parent
        return tuple(reversed(out))
