"""Exception types shared across the package."""

from fractions import Fraction


class LimitedMathError(Exception):
    """Base class for every error raised by limitedmath."""


class ContextMismatchError(LimitedMathError, ValueError):
    """Values from two different numeric contexts were combined."""


class CapExceededError(LimitedMathError, ValueError):
    """An exhaustive operation would exceed its enumeration cap."""


class BoundaryError(LimitedMathError, ArithmeticError):
    """A classical result left [-M, M] while running under the trap policy."""

    def __init__(self, op: str, value: Fraction, bound: int):
        self.op = op
        self.value = Fraction(value)
        self.bound = bound
        super().__init__(f"{op}: classical value {self.value} outside [-{bound}, {bound}]")


class CardinalityError(LimitedMathError):
    """A bounded set would grow past its M**2 capacity."""

    def __init__(self, size: int, capacity: int):
        self.size = size
        self.capacity = capacity
        super().__init__(f"set of size {size} exceeds capacity {capacity}")


class NonDifferentiableFragment(LimitedMathError, ValueError):
    """Symbolic differentiation met a node outside the polynomial fragment."""


class TrapError(LimitedMathError, ArithmeticError):
    """A Q8.8 result does not fit in 16 signed bits."""

    def __init__(self, op: str, wide: int):
        self.op = op
        self.wide = wide
        super().__init__(f"q88 {op}: wide result {wide} outside [-32768, 32767]")


class BudgetExhausted(LimitedMathError):
    """The step budget ran out before the run halted, trapped or cycled."""

    def __init__(self, steps: int):
        self.steps = steps
        super().__init__(f"no decision after {steps} steps")


class ExprSyntaxError(LimitedMathError, ValueError):
    """Expression text outside the supported grammar."""
