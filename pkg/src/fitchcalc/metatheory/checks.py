"""Structural checkers: canonicity, subformula, and the coherence harness."""

from __future__ import annotations

from dataclasses import dataclass

from ..syntax import (
    Box, Ctx, Dia, DiaIntro, Fun, Inl, Inr, Lam, Mode, Pair, Prod, Shut, Sum,
    Term, Ty, Unit, UnitIntro, VarBind, is_subformula,
)
from ..typecheck import Derivation, enumerate_derivations
from ..rewrite import is_normal
from ..semantics import Model, denote, mor_eq


class PreconditionViolated(Exception):
    pass


class NotNormal(Exception):
    pass


def canonicity_check(d: Derivation) -> bool:
    """A closed (variable-free context) normal term must start with the
    introduction form of its type's main former."""
    if any(isinstance(e, VarBind) for e in d.ctx.entries):
        raise PreconditionViolated("context assigns variables")
    if not is_normal(d.term):
        raise PreconditionViolated("term is not normal")
    match d.ty, d.term:
        case Fun(_, _), Lam(_, _, _):
            return True
        case Prod(_, _), Pair(_, _):
            return True
        case Unit(), UnitIntro():
            return True
        case Sum(_, _), (Inl(_, _) | Inr(_, _)):
            return True
        case Box(_), Shut(_):
            return True
        case Dia(_), DiaIntro(_):
            return True
    return False


@dataclass(frozen=True)
class Holds:
    pass


@dataclass(frozen=True)
class Violation:
    subterm: Term
    ty: Ty


def subformula_check(d: Derivation) -> Holds | Violation:
    """Every node's type must occur inside the root type or inside a type
    assigned in the root context. The term must be beta/cc-normal."""
    if not is_normal(d.term):
        raise NotNormal("the subformula property is about normal derivations")
    targets = [d.ty] + [e.ty for e in d.ctx.entries if isinstance(e, VarBind)]

    def walk(node: Derivation) -> Holds | Violation:
        if not any(is_subformula(node.ty, t) for t in targets):
            return Violation(node.term, node.ty)
        for c in node.children:
            result = walk(c)
            if isinstance(result, Violation):
                return result
        return Holds()

    return walk(d)


@dataclass(frozen=True)
class CoherenceReport:
    derivations: int
    passed: bool


def coherence_check(m: Model, mode: Mode, ctx: Ctx, t: Term, ty: Ty,
                    bound: int = 64) -> CoherenceReport:
    """Enumerate every derivation of the judgment and require all their
    denotations to agree."""
    m.require(mode)
    derivs = enumerate_derivations(mode, ctx, t, ty, bound)
    mors = [denote(m, d) for d in derivs]
    ok = all(mor_eq(mors[0], other) for other in mors[1:])
    return CoherenceReport(len(derivs), ok)
