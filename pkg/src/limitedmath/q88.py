"""Signed Q8.8 fixed point with trap-on-boundary arithmetic.

A value is a 16-bit two's-complement integer ``raw`` read as ``raw / 256``.
Addition widens and range-checks; multiplication widens to 32 bits, rescales
by 8 bits (optionally with symmetric rounding) and range-checks. Any result
outside 16 bits traps. There is no wrapping and no saturation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import TrapError

FRAC_BITS = 8
SCALE = 1 << FRAC_BITS
RAW_MIN = -(1 << 15)
RAW_MAX = (1 << 15) - 1
_WIDE32_MIN = -(1 << 31)
_WIDE32_MAX = (1 << 31) - 1


class RoundingMode(enum.Enum):
    TRUNCATE = "truncate"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True, order=True)
class Q88:
    raw: int

    def __post_init__(self):
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw {self.raw} does not fit in 16 signed bits")

    @property
    def value(self) -> Fraction:
        return Fraction(self.raw, SCALE)

    def decimal(self) -> str:
        """Exact decimal text; every Q8.8 value terminates within 8 digits."""
        sign = "-" if self.raw < 0 else ""
        whole, frac = divmod(abs(self.raw), SCALE)
        digits = f"{frac * 5**FRAC_BITS:08d}".rstrip("0") or "0"
        return f"{sign}{whole}.{digits}"

    def __str__(self):
        return f"{self.decimal()} (raw {self.raw})"


def _checked(op: str, wide: int) -> Q88:
    if not RAW_MIN <= wide <= RAW_MAX:
        raise TrapError(op, wide)
    return Q88(wide)


def q88_from_rational(x) -> Q88:
    """Floor ``x`` onto the 1/256 grid; trap if it does not fit."""
    return _checked("convert", math.floor(Fraction(x) * SCALE))


def q88_add(x: Q88, y: Q88) -> Q88:
    return _checked("add", x.raw + y.raw)


def q88_mul(x: Q88, y: Q88, mode: RoundingMode = RoundingMode.TRUNCATE) -> Q88:
    p = x.raw * y.raw
    # 16x16 products always fit the 32-bit intermediate.
    assert _WIDE32_MIN <= p <= _WIDE32_MAX
    if mode is RoundingMode.TRUNCATE:
        r = p >> FRAC_BITS
    elif p >= 0:
        r = (p + SCALE // 2) >> FRAC_BITS
    else:
        r = -((-p + SCALE // 2) >> FRAC_BITS)
    return _checked("mul", r)


def _oracle_raw(op: str, x: Q88, y: Q88, mode: RoundingMode) -> int:
    # Exact rational result scaled to raw units, quantized by the mode's rule.
    if op == "add":
        exact = x.value + y.value
    elif op == "mul":
        exact = x.value * y.value
    else:
        raise ValueError(f"unknown op {op!r}")
    scaled = exact * SCALE
    if op == "add" or mode is RoundingMode.TRUNCATE:
        return math.floor(scaled)
    magnitude = math.floor(abs(scaled) + Fraction(1, 2))
    return magnitude if scaled >= 0 else -magnitude


def q88_oracle_check(x: Q88, y: Q88, op: str, mode: RoundingMode = RoundingMode.TRUNCATE) -> bool:
    """True iff the datapath agrees with the exact-rational oracle, traps included."""
    expected = _oracle_raw(op, x, y, mode)
    expect_trap = not RAW_MIN <= expected <= RAW_MAX
    try:
        got = q88_add(x, y) if op == "add" else q88_mul(x, y, mode)
    except TrapError:
        return expect_trap
    return not expect_trap and got.raw == expected
