"""fitchcalc: Fitch-style modal lambda calculi (IK, IK with dia, IS4, IR).

Parsing, mode-parameterized type checking with lock-bearing contexts,
reduction and definitional equality, denotation into concrete finite
categorical models, and an executable metatheory suite.
"""

from .syntax import (
    Abort, App, Base, Box, Case, Ctx, Dia, DiaIntro, Empty, Fun, IK, IK_DIA,
    IR, IR_BOX, IS4, IS4_DIA, Inl, Inr, Lam, LetDia, Lock, Mode, Open, Pair,
    Prod, Proj1, Proj2, Shut, Sum, Term, Ty, Unit, UnitIntro, Var, VarBind,
    alpha_eq, formula_translation, free_vars, mode_named, subst,
)
from .surface import (
    ParseError, parse_ctx, parse_file, parse_term, parse_type, pretty,
    print_ctx, print_term, print_type,
)
from .typecheck import (
    Derivation, TypecheckError, check, enumerate_derivations, infer,
    validate_derivation,
)
from .rewrite import (
    Equal, Distinct, Fuel, FuelExhausted, RedexTag, Unknown, def_eq,
    eta_step, normalize, step,
)

__version__ = "0.1.0"
