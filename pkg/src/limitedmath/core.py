"""The bounded numeric domain N_M, the value map and LM arithmetic.

A context fixes the bit parameter ``b`` and with it ``M = 2**b - 1``. Every
value of the domain is a grid point ``k/M`` with ``-M**2 <= k <= M**2`` and is
stored by its integer numerator ``k``. Classical values are exact
:class:`fractions.Fraction` instances; the value map floors them onto the grid
and clamps anything at or beyond ``±M``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import BoundaryError, CapExceededError, ContextMismatchError

#: Largest accepted bit parameter. Python integers are unbounded, so this only
#: keeps M**2 and rendered numerators at a sane size.
MAX_BITS = 64

#: Default cap on the number of values any exhaustive routine will enumerate.
DEFAULT_ENUMERATION_CAP = 10**6

Rational = Union[Fraction, int]


@dataclass(frozen=True)
class NumericContext:
    bits: int

    def __post_init__(self):
        if isinstance(self.bits, bool) or not isinstance(self.bits, int):
            raise TypeError(f"bits must be an int, got {self.bits!r}")
        if not 1 <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must be in [1, {MAX_BITS}], got {self.bits}")

    @property
    def M(self) -> int:
        return (1 << self.bits) - 1

    @property
    def max_numerator(self) -> int:
        return self.M * self.M

    @property
    def domain_size(self) -> int:
        """Number of grid points, ``2*M**2 + 1``."""
        return 2 * self.max_numerator + 1

    def value(self, k: int) -> LMValue:
        return LMValue(k, self)

    def __str__(self):
        return f"N_{self.M} (b={self.bits})"


def context_new(b: int) -> NumericContext:
    return NumericContext(b)


class BoundaryPolicy(enum.Enum):
    SATURATE = "saturate"
    TRAP = "trap"


@functools.total_ordering
@dataclass(frozen=True)
class LMValue:
    """The grid point ``k/M`` of a context."""

    k: int
    context: NumericContext

    def __post_init__(self):
        bound = self.context.max_numerator
        if not -bound <= self.k <= bound:
            raise ValueError(f"numerator {self.k} outside [-{bound}, {bound}]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.k, self.context.M)

    def __lt__(self, other):
        if not isinstance(other, LMValue):
            return NotImplemented
        _same_context(self, other)
        return self.k < other.k

    def __neg__(self):
        return LMValue(-self.k, self.context)

    def __str__(self):
        return f"{self.k}/{self.context.M}"

    def __repr__(self):
        return f"LMValue({self.k}/{self.context.M})"


def _same_context(x: LMValue, y: LMValue) -> NumericContext:
    if x.context != y.context:
        raise ContextMismatchError(f"cannot combine values of {x.context} and {y.context}")
    return x.context


def _map_ratio(ctx: NumericContext, num: int, den: int) -> int:
    # Numerator of value_map(num/den); den > 0.
    M = ctx.M
    if num >= M * den:
        return ctx.max_numerator
    if num <= -M * den:
        return -ctx.max_numerator
    return (M * num) // den


def value_map(ctx: NumericContext, x: Rational) -> LMValue:
    """Map a classical rational onto the grid: saturate at ±M, floor inside."""
    x = Fraction(x)
    return LMValue(_map_ratio(ctx, x.numerator, x.denominator), ctx)


def check_bound(ctx: NumericContext, op: str, x: Rational) -> None:
    """Raise BoundaryError when ``|x| > M``; the exact bound ±M is allowed."""
    if abs(x) > ctx.M:
        raise BoundaryError(op, Fraction(x), ctx.M)


def apply_policy(ctx: NumericContext, policy: BoundaryPolicy, op: str, x: Rational) -> LMValue:
    if policy is BoundaryPolicy.TRAP:
        check_bound(ctx, op, x)
    return value_map(ctx, x)


def lm_add(policy: BoundaryPolicy, x: LMValue, y: LMValue) -> LMValue:
    ctx = _same_context(x, y)
    num = x.k + y.k
    if policy is BoundaryPolicy.TRAP and abs(num) > ctx.max_numerator:
        raise BoundaryError("add", Fraction(num, ctx.M), ctx.M)
    return LMValue(_map_ratio(ctx, num, ctx.M), ctx)


def lm_mul(policy: BoundaryPolicy, x: LMValue, y: LMValue) -> LMValue:
    ctx = _same_context(x, y)
    num = x.k * y.k
    den = ctx.max_numerator
    if policy is BoundaryPolicy.TRAP and abs(num) > ctx.M * den:
        raise BoundaryError("mul", Fraction(num, den), ctx.M)
    return LMValue(_map_ratio(ctx, num, den), ctx)


def in_grid(ctx: NumericContext, x: Rational) -> bool:
    x = Fraction(x)
    return (ctx.M * x).denominator == 1 and abs(x) <= ctx.M


def mapping_status(ctx: NumericContext, x: Rational) -> str:
    """Classify what value_map does to ``x``: exact, quantized or saturated."""
    if abs(x) > ctx.M:
        return "saturated"
    return "exact" if in_grid(ctx, x) else "quantized"


def enumerate_domain(ctx: NumericContext, cap: int = DEFAULT_ENUMERATION_CAP) -> list[LMValue]:
    if ctx.domain_size > cap:
        raise CapExceededError(f"{ctx} has {ctx.domain_size} values, cap is {cap}")
    n = ctx.max_numerator
    return [LMValue(k, ctx) for k in range(-n, n + 1)]


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, integer or decimal text exactly (``0.3`` is 3/10)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def render_rational(x: Rational) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"
