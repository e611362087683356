"""Term-model constructions: context terms, the functorial actions of box
and dia on terms, and the syntactic lock-replacement / weakening arrows.

Contexts are read as types with the customary abuse that a leading `1 x`
is dropped when the leftmost entry is a variable, matching the displays
the completeness proofs reduce against. Morphisms X -> Y are represented
as terms with one free variable `x : X`; composition is substitution.
"""

from __future__ import annotations

from ..syntax import (
    App, Box, Ctx, Dia, DiaIntro, Lam, LetDia, Lock, Open, Pair, Prod, Proj1,
    Proj2, Shut, Term, Ty, Unit, UnitIntro, Var, VarBind, subst,
)
from ..typecheck import Derivation

VAR = "x"


def ctx_type(ctx: Ctx) -> Ty:
    acc: Ty | None = None
    for e in ctx.entries:
        if isinstance(e, VarBind):
            acc = e.ty if acc is None else Prod(acc, e.ty)
        else:
            acc = Dia(Unit()) if acc is None else Dia(acc)
    return Unit() if acc is None else acc


def context_term(ctx: Ctx) -> Term:
    """c_ctx: the canonical inhabitant ctx |- c : ctx_type(ctx)."""
    acc: Term | None = None
    for e in ctx.entries:
        if isinstance(e, VarBind):
            acc = Var(e.name) if acc is None else Pair(acc, Var(e.name))
        else:
            acc = DiaIntro(UnitIntro()) if acc is None else DiaIntro(acc)
    return UnitIntro() if acc is None else acc


def compose_tm(g: Term, f: Term, var: str = VAR) -> Term:
    """g after f, as substitution."""
    return subst(g, var, f)


def identity_tm(var: str = VAR) -> Term:
    return Var(var)


def box_map(f: Term, var: str = VAR) -> Term:
    """x : box A |- shut f[open x / x] : box B, for x:A |- f:B."""
    return Shut(subst(f, var, Open(Var(var))))


def dia_map(f: Term, arg_ty: Ty, var: str = VAR) -> Term:
    """x : dia A |- letd y <- x in dia f[y/x] : dia B (monotonicity)."""
    return LetDia("y", arg_ty, Var(var), DiaIntro(subst(f, var, Var("y"))))


def eta_m_tm(var: str = VAR) -> Term:
    """x : A |- shut dia x : box dia A."""
    return Shut(DiaIntro(Var(var)))


def eps_m_tm(ty: Ty, var: str = VAR) -> Term:
    """x : dia box A |- letd y <- x in open y : A (annotation box A)."""
    return LetDia("y", Box(ty), Var(var), Open(Var("y")))


def t_axiom_tm(var: str = VAR) -> Term:
    """epsilon of the comonad: x : box A |- open x : A (IS4)."""
    return Open(Var(var))


def four_axiom_tm(var: str = VAR) -> Term:
    """delta of the comonad: x : box A |- shut shut open x : box box A (IS4)."""
    return Shut(Shut(Open(Var(var))))


def r_axiom_tm(var: str = VAR) -> Term:
    """the point: x : A |- shut x : box A (IR)."""
    return Shut(Var(var))


def q_tm(ty: Ty, var: str = VAR) -> Term:
    """x : dia A |- letd y <- x in y : A (IR; the transpose of the point)."""
    return LetDia("y", ty, Var(var), Var("y"))


def lock_repl_tm(prefix: Ctx, suffix: Ctx) -> Term:
    """The IS4 lock replacement arrow as a term:
    x : ctx_type(prefix ++ suffix) |- l : dia ctx_type(prefix)."""
    if not suffix.entries:
        return DiaIntro(Var(VAR))
    head, last = Ctx(suffix.entries[:-1]), suffix.entries[-1]
    inner = lock_repl_tm(prefix, head)
    if isinstance(last, VarBind):
        return subst(inner, VAR, Proj1(Var(VAR)))
    whole = ctx_type(Ctx(prefix.entries + head.entries))
    body = Open(LetDia("x2", ctx_type(prefix),
                       subst(inner, VAR, Var("x1")),
                       Shut(DiaIntro(Var("x2")))))
    return LetDia("x1", whole, Var(VAR), body)


def weakening_tm(prefix: Ctx, suffix: Ctx) -> Term:
    """The IR weakening arrow as a term:
    x : ctx_type(prefix ++ suffix) |- w : ctx_type(prefix)."""
    if not suffix.entries:
        return Var(VAR)
    head, last = Ctx(suffix.entries[:-1]), suffix.entries[-1]
    inner = weakening_tm(prefix, head)
    if isinstance(last, VarBind):
        return subst(inner, VAR, Proj1(Var(VAR)))
    whole = ctx_type(Ctx(prefix.entries + head.entries))
    return subst(inner, VAR, q_tm(whole))


# ---------------------------------------------------------------------------
# Term-model denotation of a derivation: a term with one free variable
# x : ctx_type(ctx) that is definitionally equal to the subject once the
# context term is substituted (the completeness lemma, rule by rule).

def tm_denote(d: Derivation) -> Term:
    mode = d.mode.calculus
    match d.rule:
        case "Var":
            i = d.split
            suffix = d.ctx.entries[i + 1:]
            if mode == "IR":
                back = weakening_tm(d.ctx.prefix(i + 1), Ctx(suffix))
            else:
                back = Var(VAR)
                for _ in suffix:
                    back = Proj1(back)  # lock-free suffix: first projections
            if i == 0:
                return back  # leading `1 x` dropped: the binding is the whole
            return Proj2(back)
        case "Lam":
            body = tm_denote(d.children[0])
            x_name, ann = d.term.name, d.term.ty
            if len(d.ctx) == 0:
                return Lam(x_name, ann, subst(body, VAR, Var(x_name)))
            return Lam(x_name, ann, subst(body, VAR, Pair(Var(VAR), Var(x_name))))
        case "App":
            return App(tm_denote(d.children[0]), tm_denote(d.children[1]))
        case "Unit":
            return UnitIntro()
        case "Pair":
            return Pair(tm_denote(d.children[0]), tm_denote(d.children[1]))
        case "Proj1":
            return Proj1(tm_denote(d.children[0]))
        case "Proj2":
            return Proj2(tm_denote(d.children[0]))
        case "Inl":
            from ..syntax import Inl
            return Inl(d.term.right_ty, tm_denote(d.children[0]))
        case "Inr":
            from ..syntax import Inr
            return Inr(d.term.left_ty, tm_denote(d.children[0]))
        case "Shut":
            inner = tm_denote(d.children[0])
            return compose_tm(box_map(inner), eta_m_tm())
        case "Open":
            inner = tm_denote(d.children[0])
            prefix_ty = ctx_type(d.children[0].ctx)
            travel = _travel_tm(d)
            return compose_tm(eps_m_tm(d.ty),
                              compose_tm(dia_map(inner, prefix_ty), travel))
        case "DiaIntro":
            inner = tm_denote(d.children[0])
            prefix_ty = ctx_type(d.children[0].ctx)
            travel = _travel_tm(d)
            return compose_tm(dia_map(inner, prefix_ty), travel)
        case "LetDia":
            scrut = tm_denote(d.children[0])
            body = tm_denote(d.children[1])
            return compose_tm(body, scrut)
    raise NotImplementedError(
        f"no displayed term-model action for rule {d.rule}")


def _travel_tm(d: Derivation) -> Term:
    """Term-level map from the whole context down to dia(prefix)."""
    mode = d.mode.calculus
    k = d.split
    if mode == "IK":
        back = Var(VAR)
        for _ in d.ctx.entries[k + 1:]:
            back = Proj1(back)
        return back
    if mode == "IS4":
        return lock_repl_tm(d.ctx.prefix(k), Ctx(d.ctx.entries[k:]))
    prefix_with_lock = Ctx(d.ctx.entries[:k + 1])
    return weakening_tm(prefix_with_lock, Ctx(d.ctx.entries[k + 1:]))
