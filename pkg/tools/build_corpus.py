#!/usr/bin/env python3
"""Regenerate the definitional-equality goal corpus under corpus/goals/.

Every goal is verified with def_eq (bound 32) before it is written; the
script fails loudly if any instance stops being provable.
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fitchcalc.syntax import (  # noqa: E402
    Base, Box, Ctx, Dia, DiaIntro, Fun, IK_DIA, IR, IS4_DIA, Lam, LetDia,
    Lock, Mode, Open, Shut, Term, Ty, Var, VarBind, mode_name, subst,
)
from fitchcalc.surface import print_ctx, print_term, print_type  # noqa: E402
from fitchcalc.typecheck import check, infer  # noqa: E402
from fitchcalc.rewrite import Equal, def_eq  # noqa: E402
from fitchcalc.metatheory.termmodel import (  # noqa: E402
    VAR, box_map, compose_tm, context_term, ctx_type, dia_map, eps_m_tm,
    eta_m_tm, four_axiom_tm, lock_repl_tm, q_tm, r_axiom_tm, t_axiom_tm,
    tm_denote, weakening_tm,
)

ROOT = Path(__file__).resolve().parent.parent / "corpus" / "goals"

A = Base("A")
INST_TYPES: list[tuple[str, Ty]] = [
    ("base", A),
    ("box", Box(A)),
    ("dia", Dia(A)),
    ("fun", Fun(A, A)),
]

# morphisms x:T |- f : T used to instantiate naturality squares
def id_at(_ty: Ty) -> Term:
    return Var(VAR)


def beta_id_at(_ty: Ty) -> Term:
    return Open(Shut(Var(VAR)))  # beta-reduces to the identity


MORPHISMS = [("id", id_at), ("betaid", beta_id_at)]


class File:
    def __init__(self, mode: Mode, header: str):
        self.mode = mode
        self.lines = [f"-- {header}", f"mode {mode_name(self.mode)}", ""]
        self.count = 0

    def goal(self, name: str, ctx: Ctx, lhs: Term, rhs: Term, ty: Ty):
        check(self.mode, ctx, lhs, ty)
        check(self.mode, ctx, rhs, ty)
        verdict = def_eq(self.mode, ctx, lhs, rhs, ty, search_bound=32)
        if not isinstance(verdict, Equal):
            raise SystemExit(
                f"goal {name}: def_eq returned {type(verdict).__name__}\n"
                f"  ctx: {print_ctx(ctx)}\n  lhs: {print_term(lhs)}\n"
                f"  rhs: {print_term(rhs)}")
        sep = " " if len(ctx) else ""
        self.lines.append(
            f"goal {name} [{print_ctx(ctx)}{sep}|- {print_term(lhs)} == "
            f"{print_term(rhs)} : {print_type(ty)}]")
        self.count += 1

    def write(self, relpath: str):
        path = ROOT / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT.parent.parent)} ({self.count} goals)")


def x_ctx(ty: Ty) -> Ctx:
    return Ctx((VarBind(VAR, ty),))


# ---------------------------------------------------------------------------
# Appendix B: the IK-dia term model

def build_b():
    f = File(IK_DIA, "box and dia are functors on the term model")
    for tag, ty in INST_TYPES:
        f.goal(f"box_id_{tag}", x_ctx(Box(ty)), box_map(id_at(ty)), Var(VAR), Box(ty))
        f.goal(f"dia_id_{tag}", x_ctx(Dia(ty)), dia_map(id_at(ty), ty), Var(VAR), Dia(ty))
    for mtag, mk in MORPHISMS:
        for tag, ty in INST_TYPES[:2]:
            g = mk(ty)
            comp_box = compose_tm(box_map(g), box_map(g))
            f.goal(f"box_comp_{mtag}_{tag}", x_ctx(Box(ty)), comp_box,
                   box_map(compose_tm(g, g)), Box(ty))
            comp_dia = compose_tm(dia_map(g, ty), dia_map(g, ty))
            f.goal(f"dia_comp_{mtag}_{tag}", x_ctx(Dia(ty)), comp_dia,
                   dia_map(compose_tm(g, g), ty), Dia(ty))
    f.write("appendix_b/functor_laws.fmlc")

    f = File(IK_DIA, "naturality of the modal adjunction unit and counit")
    for mtag, mk in MORPHISMS:
        for tag, ty in INST_TYPES:
            g = mk(ty)
            lhs = compose_tm(box_map(dia_map(g, ty)), eta_m_tm())
            rhs = compose_tm(eta_m_tm(), g)
            f.goal(f"eta_m_nat_{mtag}_{tag}", x_ctx(ty), lhs, rhs, Box(Dia(ty)))
            lhs = compose_tm(eps_m_tm(ty), dia_map(box_map(g), Box(ty)))
            rhs = compose_tm(g, eps_m_tm(ty))
            f.goal(f"eps_m_nat_{mtag}_{tag}", x_ctx(Dia(Box(ty))), lhs, rhs, ty)
    f.write("appendix_b/naturality.fmlc")

    f = File(IK_DIA, "triangle equalities of the modal adjunction")
    for tag, ty in INST_TYPES:
        lhs = compose_tm(box_map(eps_m_tm(ty)), eta_m_tm())
        f.goal(f"triangle_box_{tag}", x_ctx(Box(ty)), lhs, Var(VAR), Box(ty))
        lhs = compose_tm(eps_m_tm(ty), dia_map(eta_m_tm(), ty))
        f.goal(f"triangle_dia_{tag}", x_ctx(Dia(ty)), lhs, Var(VAR), Dia(ty))
    f.write("appendix_b/triangles.fmlc")

    # The completeness lemma, one instance per displayed rule case:
    # each subject equals its term-model denotation at the context term.
    f = File(IK_DIA, "the term-model completeness lemma, rule by rule")
    B = Base("B")
    cases = [
        ("var", "a : A, b : B", Var("a"), None),
        ("var_last", "a : A, b : B", Var("b"), None),
        ("lam", "a : A", Lam("z", B, Var("a")), None),
        ("app", "f : A -> A, a : A", Term and None, None),  # placeholder
    ]
    from fitchcalc.surface import parse_ctx, parse_term
    instances = [
        ("var", "a : A, b : B", "a"),
        ("var_last", "a : A, b : B", "b"),
        ("lam", "a : A", "\\z:B. a"),
        ("app", "f : A -> A, a : A", "f a"),
        ("unit", "a : A", "()"),
        ("pair", "a : A, b : B", "(b, a)"),
        ("proj1", "p : A * B", "fst p"),
        ("proj2", "p : A * B", "snd p"),
        ("shut", "a : []A", "shut (open a)"),
        ("open", "a : []A, #, b : B", "open a"),
        ("dia", "a : A, #, b : B", "dia a"),
        ("letdia", "s : <>A", "let dia y:A = s in dia y"),
    ]
    for name, ctx_src, term_src in instances:
        ctx = parse_ctx(ctx_src)
        term = parse_term(term_src)
        ty, deriv = infer(IK_DIA, ctx, term)
        rhs = subst(tm_denote(deriv), VAR, context_term(ctx))
        f.goal(f"compl_{name}", ctx, term, rhs, ty)
    f.write("appendix_b/completeness_cases.fmlc")


# ---------------------------------------------------------------------------
# Appendix C: IS4

def build_c():
    f = File(IS4_DIA, "naturality of the comonad counit and comultiplication")
    for mtag, mk in MORPHISMS:
        for tag, ty in INST_TYPES[:2]:
            g = mk(ty)
            lhs = compose_tm(g, t_axiom_tm())
            rhs = compose_tm(t_axiom_tm(), box_map(g))
            f.goal(f"eps_nat_{mtag}_{tag}", x_ctx(Box(ty)), lhs, rhs, ty)
            lhs = compose_tm(four_axiom_tm(), box_map(g))
            rhs = compose_tm(box_map(box_map(g)), four_axiom_tm())
            f.goal(f"delta_nat_{mtag}_{tag}", x_ctx(Box(ty)), lhs, rhs, Box(Box(ty)))
    f.write("appendix_c/naturality.fmlc")

    f = File(IS4_DIA, "box is an idempotent comonad in the term model")
    for tag, ty in INST_TYPES:
        bty = Box(ty)
        f.goal(f"coassoc_{tag}", x_ctx(bty),
               compose_tm(four_axiom_tm(), four_axiom_tm()),
               compose_tm(box_map(four_axiom_tm()), four_axiom_tm()), Box(Box(bty)))
        f.goal(f"counit_left_{tag}", x_ctx(bty),
               compose_tm(t_axiom_tm(), four_axiom_tm()), Var(VAR), bty)
        f.goal(f"counit_right_{tag}", x_ctx(bty),
               compose_tm(box_map(t_axiom_tm()), four_axiom_tm()), Var(VAR), bty)
        # idempotence: delta and the counit at box are mutually inverse
        f.goal(f"idem_unfold_{tag}", x_ctx(bty),
               compose_tm(t_axiom_tm(), four_axiom_tm()), Var(VAR), bty)
        f.goal(f"idem_fold_{tag}", x_ctx(Box(bty)),
               compose_tm(four_axiom_tm(), t_axiom_tm()), Var(VAR), Box(bty))
    f.write("appendix_c/comonad_laws.fmlc")

    # lock replacement against context terms: l[c/x] == dia c
    f = File(IS4_DIA, "lock replacement arrows against context terms")
    from fitchcalc.surface import parse_ctx
    shapes = [
        ("empty", "w : A", ""),
        ("var", "w : A", "y : B"),
        ("lock", "w : A", "#"),
        ("var_lock", "w : A", "y : B, #"),
        ("lock_var", "w : A", "#, y : B"),
        ("locks", "w : A", "#, #"),
        ("from_nothing", "", "#"),
    ]
    for name, g_src, s_src in shapes:
        gamma = parse_ctx(g_src)
        suffix = parse_ctx(s_src)
        whole = Ctx(gamma.entries + suffix.entries)
        lhs = subst(lock_repl_tm(gamma, suffix), VAR, context_term(whole))
        rhs = DiaIntro(context_term(gamma))
        f.goal(f"l_ctx_{name}", whole, lhs, rhs, Dia(ctx_type(gamma)))
    f.write("appendix_c/lock_replacement.fmlc")

    # IS4 open/dia completeness cases go through the l arrows
    f = File(IS4_DIA, "completeness cases specific to the IS4 open and dia rules")
    from fitchcalc.surface import parse_term
    instances = [
        ("open_no_lock", "a : []A", "open a"),
        ("open_lock", "a : []A, #", "open a"),
        ("open_suffix", "a : []A, #, b : B", "open a"),
        ("dia_no_lock", "a : A", "dia a"),
        ("dia_suffix", "a : A, #, b : B", "dia a"),
    ]
    for name, ctx_src, term_src in instances:
        ctx = parse_ctx(ctx_src)
        term = parse_term(term_src)
        ty, deriv = infer(IS4_DIA, ctx, term)
        rhs = subst(tm_denote(deriv), VAR, context_term(ctx))
        f.goal(f"compl_{name}", ctx, term, rhs, ty)
    f.write("appendix_c/completeness_cases.fmlc")


# ---------------------------------------------------------------------------
# Appendix D: IR

def build_d():
    f = File(IR, "the point r and its transpose q in the term model")
    for mtag, mk in MORPHISMS:
        for tag, ty in INST_TYPES[:2]:
            g = mk(ty)
            lhs = compose_tm(box_map(g), r_axiom_tm())
            rhs = compose_tm(r_axiom_tm(), g)
            f.goal(f"r_nat_{mtag}_{tag}", x_ctx(ty), lhs, rhs, Box(ty))
    for tag, ty in INST_TYPES:
        # box preserves the point: box r == r at box T
        f.goal(f"box_r_{tag}", x_ctx(Box(ty)), box_map(r_axiom_tm()),
               r_axiom_tm(), Box(Box(ty)))
        # q == dia q : dia dia T -> dia T
        lhs = q_tm(Dia(ty))
        rhs = dia_map(q_tm(ty), Dia(ty))
        f.goal(f"q_dia_q_{tag}", x_ctx(Dia(Dia(ty))), lhs, rhs, Dia(ty))
    f.write("appendix_d/point_laws.fmlc")

    f = File(IR, "weakening arrows against context terms")
    from fitchcalc.surface import parse_ctx
    shapes = [
        ("empty", "w : A", ""),
        ("var", "w : A", "y : B"),
        ("lock", "w : A", "#"),
        ("var_lock", "w : A", "y : B, #"),
        ("lock_var", "w : A", "#, y : B"),
        ("locks", "w : A", "#, #"),
    ]
    for name, g_src, s_src in shapes:
        gamma = parse_ctx(g_src)
        suffix = parse_ctx(s_src)
        whole = Ctx(gamma.entries + suffix.entries)
        lhs = subst(weakening_tm(gamma, suffix), VAR, context_term(whole))
        rhs = context_term(gamma)
        f.goal(f"w_ctx_{name}", whole, lhs, rhs, ctx_type(gamma))
    f.write("appendix_d/weakening.fmlc")

    f = File(IR, "completeness cases specific to the IR rules")
    from fitchcalc.surface import parse_ctx, parse_term
    instances = [
        ("var_behind_lock", "a : A, #", "a"),
        ("var_plain", "a : A, b : B", "a"),
        ("open_extra_lock", "a : []A, #, #", "open a"),
        ("open_suffix", "a : []A, #, b : B", "open a"),
        ("dia_extra", "a : A, #, #", "dia a"),
        ("shut_r", "a : A", "shut a"),
    ]
    for name, ctx_src, term_src in instances:
        ctx = parse_ctx(ctx_src)
        term = parse_term(term_src)
        ty, deriv = infer(IR, ctx, term)
        rhs = subst(tm_denote(deriv), VAR, context_term(ctx))
        f.goal(f"compl_{name}", ctx, term, rhs, ty)
    f.write("appendix_d/completeness_cases.fmlc")


if __name__ == "__main__":
    build_b()
    build_c()
    build_d()
    print("corpus verified and written")
