from .axioms import ALL_AXIOMS, AxiomUnavailableInMode, Mono, axiom_term
from .checks import (
    CoherenceReport, Holds, NotNormal, PreconditionViolated, Violation,
    canonicity_check, coherence_check, subformula_check,
)
from .generate import GenConfig, GenerationExhausted, gen_typed_term
from .transforms import (
    ContextMismatch, ModeUnsupported, NameClash, NotALock, VariableIsFree,
    left_weaken, lock_replace, lock_weaken, necessitate, strengthen,
    substitute_deriv, weaken_var,
)
from .termmodel import (
    box_map, compose_tm, context_term, ctx_type, dia_map, eps_m_tm, eta_m_tm,
    four_axiom_tm, lock_repl_tm, q_tm, r_axiom_tm, t_axiom_tm, tm_denote,
    weakening_tm,
)
from . import suites

__all__ = [
    "ALL_AXIOMS", "AxiomUnavailableInMode", "Mono", "axiom_term",
    "CoherenceReport", "Holds", "NotNormal", "PreconditionViolated",
    "Violation", "canonicity_check", "coherence_check", "subformula_check",
    "GenConfig", "GenerationExhausted", "gen_typed_term",
    "ContextMismatch", "ModeUnsupported", "NameClash", "NotALock",
    "VariableIsFree", "left_weaken", "lock_replace", "lock_weaken",
    "necessitate", "strengthen", "substitute_deriv", "weaken_var",
    "box_map", "compose_tm", "context_term", "ctx_type", "dia_map",
    "eps_m_tm", "eta_m_tm", "four_axiom_tm", "lock_repl_tm", "q_tm",
    "r_axiom_tm", "t_axiom_tm", "tm_denote", "weakening_tm",
    "suites",
]
