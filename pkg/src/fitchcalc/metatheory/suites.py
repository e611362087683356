"""Property suites over the generated corpus.

Every suite is seed-deterministic: sample i of a run with seed s uses
generator seed s*1_000_003 + i, so shards can be re-run independently
and failures replayed by seed. Results carry machine-readable counts
and the failing seeds.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from ..syntax import (
    Ctx, IK, IK_DIA, IR, IS4, Mode, Term, Ty, VarBind, alpha_eq, mode_name,
)
from ..typecheck import (
    BoundExceeded, Derivation, TypecheckError, check, enumerate_derivations,
    infer,
)
from ..rewrite import (
    Fuel, FuelExhausted, assoc_candidates, def_eq, Equal, eta_contract_candidates,
    eta_step, normalize, normalize_innermost, term_size, trace_terms,
)
from ..semantics import Model, denote, mor_eq
from .checks import canonicity_check, coherence_check, subformula_check, Holds
from .generate import GenConfig, GenerationExhausted, gen_typed_term


@dataclass
class SuiteResult:
    suite: str
    mode: str
    samples: int
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "mode": self.mode,
            "samples": self.samples,
            "checked": self.checked,
            "passed": self.passed,
            "failures": self.failures,
            "info": self.info,
        }


def sample_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def _sample(mode: Mode, seed: int, i: int, **kw) -> tuple[Ctx, Term, Ty, Derivation]:
    cfg = GenConfig(mode=mode, seed=sample_seed(seed, i), **kw)
    return gen_typed_term(cfg)


def run_subject_reduction(mode: Mode, samples: int, seed: int,
                          max_size: int = 30) -> SuiteResult:
    """Every contraction along every normalization trace preserves the
    inferred type; fuel 10*size^2 is never exhausted on the way."""
    res = SuiteResult("subject-reduction", mode_name(mode), samples)
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(mode, seed, i, max_size=max_size,
                                       redex_bias=0.45)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            for reduct, tag in trace_terms(term):
                got, _ = infer(mode, ctx, reduct)
                if got != ty:
                    res.failures.append(
                        f"seed {sample_seed(seed, i)}: type changed after {tag.name}")
                    break
        except (TypecheckError, FuelExhausted) as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {type(exc).__name__}: {exc}")
    return res


def run_normalization(mode: Mode, samples: int, seed: int,
                      max_size: int = 30) -> SuiteResult:
    """Empirical strong normalization: fuel 10*size(t)^2 always suffices."""
    res = SuiteResult("normalization", mode_name(mode), samples)
    total_steps = 0
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(mode, seed, i, max_size=max_size,
                                       redex_bias=0.45)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            _, steps = normalize(term, Fuel.default_for(term))
            total_steps += steps
        except FuelExhausted:
            res.failures.append(
                f"seed {sample_seed(seed, i)}: fuel exhausted at size {term_size(term)}")
    res.info["total_steps"] = total_steps
    return res


def run_confluence(mode: Mode, samples: int, seed: int,
                   max_size: int = 30) -> SuiteResult:
    """Innermost and outermost orders reach alpha-equal normal forms."""
    res = SuiteResult("confluence", mode_name(mode), samples)
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(mode, seed, i, max_size=max_size,
                                       redex_bias=0.5)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            outer, _ = normalize(term)
            inner, _ = normalize_innermost(term)
        except FuelExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        if not alpha_eq(outer, inner):
            res.failures.append(f"seed {sample_seed(seed, i)}: normal forms differ")
    return res


def run_canonicity(mode: Mode, samples: int, seed: int,
                   max_size: int = 20) -> SuiteResult:
    """Closed (variable-free context) normal forms start with the
    introduction form of their type."""
    res = SuiteResult("canonicity", mode_name(mode), samples)
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(mode, seed, i, max_size=max_size,
                                       locks_only_ctx=True, closed_types=True)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            nf, _ = normalize(term)
            deriv = check(mode, ctx, nf, ty)
        except (FuelExhausted, TypecheckError) as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        if not canonicity_check(deriv):
            res.failures.append(
                f"seed {sample_seed(seed, i)}: normal form is not canonical")
    return res


def run_subformula(samples: int, seed: int, max_size: int = 24) -> SuiteResult:
    """Normal IK terms (sums included) satisfy the subformula property."""
    res = SuiteResult("subformula", mode_name(IK), samples)
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(IK, seed, i, max_size=max_size,
                                       redex_bias=0.45)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            nf, _ = normalize(term)
            deriv = check(IK, ctx, nf, ty)
        except (FuelExhausted, TypecheckError) as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        verdict = subformula_check(deriv)
        if not isinstance(verdict, Holds):
            res.failures.append(
                f"seed {sample_seed(seed, i)}: violation at type {verdict.ty}")
    return res


def run_coherence(mode: Mode, model: Model, samples: int, seed: int,
                  bound: int = 64, max_size: int = 14) -> SuiteResult:
    """All enumerable derivations of a generated judgment denote equal
    morphisms. Judgments with a unique derivation pass vacuously but are
    not counted as multi-derivation evidence."""
    res = SuiteResult("coherence", mode_name(mode), samples)
    multi = 0
    for i in range(samples):
        try:
            ctx, term, ty, _ = _sample(mode, seed, i, max_size=max_size,
                                       model_safe_types=True, max_ctx=4)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        try:
            report = coherence_check(model, mode, ctx, term, ty, bound)
        except BoundExceeded:
            res.info["bound_exceeded"] = res.info.get("bound_exceeded", 0) + 1
            continue
        if report.derivations > 1:
            multi += 1
        if not report.passed:
            res.failures.append(
                f"seed {sample_seed(seed, i)}: {report.derivations} derivations disagree")
    res.info["multi_derivation_judgments"] = multi
    return res


def run_soundness(mode: Mode, model: Model, samples: int, seed: int,
                  max_size: int = 12) -> SuiteResult:
    """Every beta/cc contraction and every eta/associativity instance
    preserves the denotation exactly."""
    res = SuiteResult("soundness", mode_name(mode), samples)
    steps_checked = 0
    for i in range(samples):
        try:
            ctx, term, ty, deriv = _sample(mode, seed, i, max_size=max_size,
                                           model_safe_types=True, max_ctx=3,
                                           redex_bias=0.5)
        except GenerationExhausted as exc:
            res.failures.append(f"seed {sample_seed(seed, i)}: {exc}")
            continue
        res.checked += 1
        tag = f"seed {sample_seed(seed, i)}"
        try:
            before = denote(model, deriv)
            cur = term
            for reduct, rtag in trace_terms(term):
                after = denote(model, check(mode, ctx, reduct, ty))
                if not mor_eq(before, after):
                    res.failures.append(f"{tag}: denotation changed at {rtag.name}")
                    break
                before, cur = after, reduct
                steps_checked += 1
            else:
                nf_deriv = check(mode, ctx, cur, ty)
                steps_checked += _eta_assoc_preserved(mode, model, ctx, ty,
                                                      nf_deriv, res, tag)
        except Exception as exc:  # denotation machinery must never trap
            res.failures.append(f"{tag}: {type(exc).__name__}: {exc}")
    res.info["steps_checked"] = steps_checked
    return res


def _eta_assoc_preserved(mode: Mode, model: Model, ctx: Ctx, ty: Ty,
                         deriv: Derivation, res: SuiteResult, tag: str) -> int:
    base = denote(model, deriv)
    n = 0
    for cand, label in eta_contract_candidates(deriv) + assoc_candidates(deriv.term):
        try:
            cand_deriv = check(mode, ctx, cand, ty)
        except TypecheckError:
            continue  # candidate not well-typed at this judgment; skip
        if not mor_eq(base, denote(model, cand_deriv)):
            res.failures.append(f"{tag}: {label} changed the denotation")
        n += 1
    return n


def run_appendix_goals(files: list, mode_default: Mode | None = None,
                       bound: int = 32) -> SuiteResult:
    """def_eq must prove every goal declaration in the corpus files."""
    from ..surface import parse_file

    res = SuiteResult("appendix-goals", "per-file", 0)
    for path in files:
        src = parse_file(open(path, encoding="utf-8").read())
        mode = src.mode or mode_default
        if mode is None:
            res.failures.append(f"{path}: no mode declared")
            continue
        for goal in src.goals.values():
            res.samples += 1
            res.checked += 1
            try:
                verdict = def_eq(mode, goal.ctx, goal.lhs, goal.rhs, goal.ty,
                                 search_bound=bound)
            except Exception as exc:
                res.failures.append(f"{path}:{goal.name}: {type(exc).__name__}: {exc}")
                continue
            if not isinstance(verdict, Equal):
                res.failures.append(
                    f"{path}:{goal.name}: {type(verdict).__name__}")
    return res


SUITE_NAMES = ("subject-reduction", "confluence", "canonicity", "subformula",
               "coherence", "soundness", "appendix-goals")
