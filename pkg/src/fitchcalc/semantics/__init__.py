from .core import (
    Mor, Obj, ShapeMismatch, all_morphisms, bang, compose, copair, coproduct,
    curry, ev, exponential, identity, initial, inj1, inj2, invert, mor_eq,
    pairing, product, product_mor, proj1, proj2, terminal, unique_from_empty,
)
from .models import (
    ChainModel, ConstantComonadModel, IdentityModel, Model, ModeUnsupported,
    UnknownBaseType, base_from_tables, default_tables, make_model,
    model_from_decl,
)
from .denote import (
    denote, denote_ctx, denote_type, eval_closed, lock_repl_nat, suffix_mor,
    suffix_obj, weakening_nat,
)

__all__ = [
    "Mor", "Obj", "ShapeMismatch", "all_morphisms", "bang", "compose",
    "copair", "coproduct", "curry", "ev", "exponential", "identity",
    "initial", "inj1", "inj2", "invert", "mor_eq", "pairing", "product",
    "product_mor", "proj1", "proj2", "terminal", "unique_from_empty",
    "ChainModel", "ConstantComonadModel", "IdentityModel", "Model",
    "ModeUnsupported", "UnknownBaseType", "base_from_tables",
    "default_tables", "make_model", "model_from_decl",
    "denote", "denote_ctx", "denote_type", "eval_closed", "lock_repl_nat",
    "suffix_mor", "suffix_obj", "weakening_nat",
]
