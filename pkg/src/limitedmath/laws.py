"""Exhaustive checks of algebraic laws over a small grid.

Each check scans every operand tuple of the domain, evaluating both sides of a
law with ``⊕``/``⊗`` applied immediately after each operation. Results are
split into two tiers: the law over the whole universe, and the law restricted
to tuples whose intermediate classical results all stay on the grid.

Arithmetic runs on integer numerators with numpy; for ``x = a/M, y = b/M``
``x ⊕ y`` has numerator ``clip(a + b)`` and ``x ⊗ y`` has numerator
``clip(floor(a*b / M))``, both clipped to ``[-M**2, M**2]``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .core import (
    DEFAULT_ENUMERATION_CAP,
    BoundaryPolicy,
    LMValue,
    NumericContext,
    lm_add,
    lm_mul,
)
from .errors import CapExceededError

LAWS = ("commutativity", "associativity", "distributivity", "cancellation")


@dataclass(frozen=True)
class Counterexample:
    op: str
    operands: tuple
    left: int
    right: int


class Counterexamples(Sequence):
    """Sorted counterexamples held as numpy columns.

    Large grids fail laws on tens of millions of tuples, so ``Counterexample``
    objects are only built on access.
    """

    def __init__(self, ops=(), codes=None, operands=None, left=None, right=None):
        self._ops = tuple(ops)
        self._codes = np.zeros(0, dtype=np.int8) if codes is None else codes
        self._operands = np.zeros((0, 0), dtype=np.int64) if operands is None else operands
        self._left = np.zeros(0, dtype=np.int64) if left is None else left
        self._right = np.zeros(0, dtype=np.int64) if right is None else right

    def __len__(self):
        return len(self._left)

    def _at(self, i):
        return Counterexample(
            self._ops[self._codes[i]],
            tuple(int(v) for v in self._operands[i]),
            int(self._left[i]),
            int(self._right[i]),
        )

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._at(j) for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        return self._at(i)

    def find(self, operands: tuple) -> list:
        """All counterexamples with exactly these operands."""
        if not len(self) or len(operands) != self._operands.shape[1]:
            return []
        hit = np.nonzero(np.all(self._operands == np.asarray(operands), axis=1))[0]
        return [self._at(i) for i in hit]

    def __contains__(self, c):
        return isinstance(c, Counterexample) and c in self.find(c.operands)

    def __repr__(self):
        return f"Counterexamples(len={len(self)})"


@dataclass
class LawReport:
    law: str
    context: NumericContext
    universe_size: int
    in_range_size: int
    holds_universally: bool
    in_range_holds: bool
    counterexamples: Counterexamples = field(default_factory=Counterexamples)

    @property
    def expectation_met(self) -> bool:
        """Whether the report matches what the theory predicts for this law."""
        if self.law == "commutativity":
            return self.holds_universally
        if self.law == "associativity":
            M2 = self.context.max_numerator
            witness = (M2, M2, -M2)
            return self.in_range_holds and bool(self.counterexamples.find(witness))
        if self.law == "cancellation":
            return self.in_range_holds and bool(self.counterexamples)
        return self.in_range_holds


def _add(a, b, n):
    return np.clip(a + b, -n, n)


def _mul(a, b, M, n):
    return np.clip(np.floor_divide(a * b, M), -n, n)


def _on_grid_product(a, b, M, n):
    # a*b/M**2 lies on the grid iff M divides a*b and |a*b/M| <= M**2.
    p = a * b
    return (p % M == 0) & (np.abs(p) <= n * M)


def _guard(ctx: NumericContext, arity: int, cap: int) -> int:
    size = ctx.domain_size ** arity
    if size > cap:
        raise CapExceededError(
            f"{arity}-tuples over {ctx} number {size}, cap is {cap}"
        )
    return size


def _domain(ctx: NumericContext) -> np.ndarray:
    n = ctx.max_numerator
    return np.arange(-n, n + 1, dtype=np.int64)


def _scan(ctx, arity, kernel, cap):
    """Run ``kernel(x, rest...) -> (op, fail_mask, in_range_mask, left, right)``
    for each leading operand ``x``; trailing operands are broadcast grids."""
    universe = _guard(ctx, arity, cap)
    d = _domain(ctx)
    grids = np.meshgrid(*([d] * (arity - 1)), indexing="ij")
    dtype = np.int32 if ctx.max_numerator < 2**31 else np.int64
    ops = []
    chunks = []
    in_range_size = 0
    in_range_ok = True
    for x in d:
        per_x = []
        for op, fail, in_range, left, right in kernel(x, *grids):
            in_range_size += int(np.count_nonzero(in_range))
            if np.any(fail & in_range):
                in_range_ok = False
            idx = np.nonzero(fail)
            if not idx[0].size:
                continue
            if op not in ops:
                ops.append(op)
            m = idx[0].size
            cols = np.empty((m, arity), dtype=dtype)
            cols[:, 0] = x
            for j, g in enumerate(grids, 1):
                cols[:, j] = g[idx]
            code = np.full(m, ops.index(op), dtype=np.int8)
            per_x.append((code, cols, left[idx].astype(dtype), right[idx].astype(dtype)))
        if not per_x:
            continue
        code, cols, left, right = (np.concatenate(parts) for parts in zip(*per_x))
        if len(per_x) > 1:
            # Rows within one chunk are already in operand order; interleave ops.
            order = np.lexsort((np.array(ops)[code], *cols.T[::-1]))
            code, cols, left, right = code[order], cols[order], left[order], right[order]
        chunks.append((code, cols, left, right))
    if chunks:
        code, cols, left, right = (np.concatenate(parts) for parts in zip(*chunks))
        found = Counterexamples(ops, code, cols, left, right)
    else:
        found = Counterexamples()
    return LawReport("", ctx, universe, in_range_size, not found, in_range_ok, found)


def check_commutativity(ctx: NumericContext, cap: int = DEFAULT_ENUMERATION_CAP) -> LawReport:
    """Check ``x ⊕ y = y ⊕ x`` and ``x ⊗ y = y ⊗ x`` over all pairs."""
    M, n = ctx.M, ctx.max_numerator

    def kernel(x, y):
        l_add, r_add = _add(x, y, n), _add(y, x, n)
        yield "add", l_add != r_add, np.abs(x + y) <= n, l_add, r_add
        l_mul, r_mul = _mul(x, y, M, n), _mul(y, x, M, n)
        yield "mul", l_mul != r_mul, _on_grid_product(x, y, M, n), l_mul, r_mul

    report = _scan(ctx, 2, kernel, cap)
    report.law = "commutativity"
    return report


def check_associativity_add(ctx: NumericContext, cap: int = DEFAULT_ENUMERATION_CAP) -> LawReport:
    """Check ``(x ⊕ y) ⊕ z = x ⊕ (y ⊕ z)`` over all triples.

    In-range tier: ``x+y``, ``y+z`` and ``x+y+z`` all lie on the grid.
    """
    n = ctx.max_numerator

    def kernel(x, y, z):
        left = _add(_add(x, y, n), z, n)
        right = _add(x, _add(y, z, n), n)
        in_range = (np.abs(x + y) <= n) & (np.abs(y + z) <= n) & (np.abs(x + y + z) <= n)
        yield "add", left != right, in_range, left, right

    report = _scan(ctx, 3, kernel, cap)
    report.law = "associativity"
    return report


def check_distributivity(ctx: NumericContext, cap: int = DEFAULT_ENUMERATION_CAP) -> LawReport:
    """Check ``x ⊗ (y ⊕ z) = (x ⊗ y) ⊕ (x ⊗ z)`` over all triples.

    In-range tier: ``y+z``, ``x(y+z)``, ``xy`` and ``xz`` all lie on the grid.
    The ``y+z`` condition matters: with M=3, x=1/3, y=z=3 the three products
    are on the grid but ``y ⊕ z`` saturates and the law fails.
    """
    M, n = ctx.M, ctx.max_numerator

    def kernel(x, y, z):
        s = y + z
        left = _mul(x, _add(y, z, n), M, n)
        right = _add(_mul(x, y, M, n), _mul(x, z, M, n), n)
        in_range = (
            (np.abs(s) <= n)
            & _on_grid_product(x, s, M, n)
            & _on_grid_product(x, y, M, n)
            & _on_grid_product(x, z, M, n)
        )
        yield "distribute", left != right, in_range, left, right

    report = _scan(ctx, 3, kernel, cap)
    report.law = "distributivity"
    return report


def check_cancellation(ctx: NumericContext, cap: int = DEFAULT_ENUMERATION_CAP) -> LawReport:
    """Search for ``x ⊕ y = x ⊕ z`` with ``y != z``.

    A counterexample's ``left``/``right`` are ``x ⊕ y`` and ``x ⊕ z``, which
    are equal; what fails is the conclusion ``y = z``. In-range tier:
    ``x+y`` and ``x+z`` lie on the grid.
    """
    n = ctx.max_numerator

    def kernel(x, y, z):
        left, right = _add(x, y, n), _add(x, z, n)
        fail = (left == right) & (y != z)
        in_range = (np.abs(x + y) <= n) & (np.abs(x + z) <= n)
        yield "add", fail, in_range, left, right

    report = _scan(ctx, 3, kernel, cap)
    report.law = "cancellation"
    return report


CHECKS: dict[str, Callable[..., LawReport]] = {
    "commutativity": check_commutativity,
    "associativity": check_associativity_add,
    "distributivity": check_distributivity,
    "cancellation": check_cancellation,
}


def replay(ctx: NumericContext, law: str, c: Counterexample) -> tuple[int, int]:
    """Re-evaluate a counterexample through the scalar arithmetic in ``core``."""
    sat = BoundaryPolicy.SATURATE
    v = [LMValue(k, ctx) for k in c.operands]
    add = lambda a, b: lm_add(sat, a, b)  # noqa: E731
    mul = lambda a, b: lm_mul(sat, a, b)  # noqa: E731
    if law == "commutativity":
        fn = add if c.op == "add" else mul
        return fn(v[0], v[1]).k, fn(v[1], v[0]).k
    x, y, z = v
    if law == "associativity":
        return add(add(x, y), z).k, add(x, add(y, z)).k
    if law == "distributivity":
        return mul(x, add(y, z)).k, add(mul(x, y), mul(x, z)).k
    if law == "cancellation":
        return add(x, y).k, add(x, z).k
    raise ValueError(f"unknown law {law!r}")


def confirms(ctx: NumericContext, law: str, c: Counterexample) -> bool:
    """True if replaying ``c`` still breaks the law."""
    left, right = replay(ctx, law, c)
    if (left, right) != (c.left, c.right):
        return False
    if law == "cancellation":
        return left == right and c.operands[1] != c.operands[2]
    return left != right


_NAMES = ("x", "y", "z")


def _fmt_ce(ctx: NumericContext, law: str, c: Counterexample) -> str:
    M = ctx.M
    parts = [f"law={law}"]
    if law == "commutativity":
        parts.append(f"op={c.op}")
    parts += [f"{name}={k}/{M}" for name, k in zip(_NAMES, c.operands)]
    parts += [f"left={c.left}/{M}", f"right={c.right}/{M}"]
    return " ".join(parts)


def render_report(r: LawReport, limit: int = 10) -> str:
    tier = lambda ok: "PASS" if ok else "FAIL"  # noqa: E731
    lines = [
        f"{r.law} over {r.context} ({r.universe_size} tuples)",
        f"  universal: {tier(r.holds_universally)} ({len(r.counterexamples)} counterexamples)",
        f"  in-range:  {tier(r.in_range_holds)} ({r.in_range_size} in-range checks)",
        f"  expectation: {'met' if r.expectation_met else 'NOT met'}",
    ]
    shown = _showcase(r, limit)
    for c in shown:
        lines.append("  " + _fmt_ce(r.context, r.law, c).split(" ", 1)[1])
    if len(r.counterexamples) > len(shown):
        lines.append(f"  ... {len(r.counterexamples) - len(shown)} more")
    return "\n".join(lines)


def _showcase(r: LawReport, limit: int) -> list:
    shown = r.counterexamples[:limit]
    if r.law == "associativity" and limit > 0:
        # Keep the canonical (M, M, -M) witness visible; it sorts last.
        M2 = r.context.max_numerator
        witness = r.counterexamples.find((M2, M2, -M2))
        if witness and witness[0] not in shown:
            shown = shown[: limit - 1] + witness
    return shown


def porcelain_records(r: LawReport) -> Iterator[str]:
    yield (
        f"law={r.law} bits={r.context.bits} M={r.context.M} universe={r.universe_size} "
        f"in_range_checks={r.in_range_size} "
        f"universal={'PASS' if r.holds_universally else 'FAIL'} "
        f"in_range={'PASS' if r.in_range_holds else 'FAIL'} "
        f"counterexamples={len(r.counterexamples)} "
        f"expectation={'met' if r.expectation_met else 'unmet'}"
    )
    for c in r.counterexamples:
        yield _fmt_ce(r.context, r.law, c)
