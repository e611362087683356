"""The axiom-term library: each named axiom maps to the witness
derivation displayed in the paper, at generic base types A and B."""

from __future__ import annotations

from dataclasses import dataclass

from ..syntax import (
    App, Base, Box, Ctx, Dia, DiaIntro, Fun, LetDia, Lock, Mode, Open, Shut,
    Term, Ty, Var, VarBind,
)
from ..typecheck import TypecheckError, infer


class AxiomUnavailableInMode(Exception):
    pass


@dataclass(frozen=True)
class Mono:
    """Monotonicity at a closed function term."""
    fn: Term


AxiomName = str | Mono  # "K" | "T" | "Four" | "R" | "EtaM" | "EpsM" | Mono(f)

_A = Base("A")
_B = Base("B")


def axiom_term(name: AxiomName, mode: Mode) -> tuple[Ctx, Term, Ty]:
    """The witness judgment for the axiom, checked in the given mode."""
    if isinstance(name, Mono):
        if not mode.dia_enabled:
            raise AxiomUnavailableInMode("monotonicity needs the dia fragment")
        try:
            fn_ty, _ = infer(mode, Ctx(), name.fn)
        except TypecheckError as exc:
            raise AxiomUnavailableInMode(f"monotonicity needs a closed function: {exc}")
        if not isinstance(fn_ty, Fun):
            raise AxiomUnavailableInMode("monotonicity needs a function term")
        ctx = Ctx((VarBind("x", Dia(fn_ty.arg)),))
        term = LetDia("y", fn_ty.arg, Var("x"), DiaIntro(App(name.fn, Var("y"))))
        return _checked(mode, ctx, term, Dia(fn_ty.res))

    match name:
        case "K":
            ctx = Ctx((VarBind("f", Box(Fun(_A, _B))), VarBind("x", Box(_A))))
            term = Shut(App(Open(Var("f")), Open(Var("x"))))
            return _checked(mode, ctx, term, Box(_B))
        case "T":
            if mode.calculus != "IS4":
                raise AxiomUnavailableInMode("T needs the IS4 open rule")
            ctx = Ctx((VarBind("x", Box(_A)),))
            return _checked(mode, ctx, Open(Var("x")), _A)
        case "Four":
            if mode.calculus != "IS4":
                raise AxiomUnavailableInMode("4 needs the IS4 open rule")
            ctx = Ctx((VarBind("x", Box(_A)),))
            return _checked(mode, ctx, Shut(Shut(Open(Var("x")))), Box(Box(_A)))
        case "R":
            if mode.calculus != "IR":
                raise AxiomUnavailableInMode("R needs the IR variable rule")
            ctx = Ctx((VarBind("x", _A),))
            return _checked(mode, ctx, Shut(Var("x")), Box(_A))
        case "EtaM":
            if not mode.dia_enabled:
                raise AxiomUnavailableInMode("the adjunction unit needs dia")
            ctx = Ctx((VarBind("x", _A),))
            return _checked(mode, ctx, Shut(DiaIntro(Var("x"))), Box(Dia(_A)))
        case "EpsM":
            if not mode.dia_enabled:
                raise AxiomUnavailableInMode("the adjunction counit needs dia")
            ctx = Ctx((VarBind("x", Dia(Box(_A))),))
            term = LetDia("y", Box(_A), Var("x"), Open(Var("y")))
            return _checked(mode, ctx, term, _A)
    raise ValueError(f"unknown axiom {name!r}")


def _checked(mode: Mode, ctx: Ctx, term: Term, ty: Ty) -> tuple[Ctx, Term, Ty]:
    got, _ = infer(mode, ctx, term)
    if got != ty:
        raise AxiomUnavailableInMode(
            f"axiom witness does not check at the expected type in {mode}")
    return ctx, term, ty


ALL_AXIOMS: tuple[str, ...] = ("K", "T", "Four", "R", "EtaM", "EpsM")
