"""Limited Math: bounded numeric semantics with explicit saturation and quantization."""

from .core import (
    BoundaryPolicy,
    LMValue,
    NumericContext,
    context_new,
    enumerate_domain,
    in_grid,
    lm_add,
    lm_mul,
    value_map,
)
from .errors import (
    BoundaryError,
    BudgetExhausted,
    CapExceededError,
    CardinalityError,
    ContextMismatchError,
    ExprSyntaxError,
    LimitedMathError,
    NonDifferentiableFragment,
    TrapError,
)

__all__ = [
    "BoundaryError",
    "BoundaryPolicy",
    "BudgetExhausted",
    "CapExceededError",
    "CardinalityError",
    "ContextMismatchError",
    "ExprSyntaxError",
    "LMValue",
    "LimitedMathError",
    "NonDifferentiableFragment",
    "NumericContext",
    "TrapError",
    "context_new",
    "enumerate_domain",
    "in_grid",
    "lm_add",
    "lm_mul",
    "value_map",
]
