"""Finite sets of grid values, capped at M**2 elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import LMValue, NumericContext
from .errors import CardinalityError, ContextMismatchError


@dataclass(frozen=True)
class BoundedSet:
    context: NumericContext
    numerators: frozenset = frozenset()

    def __post_init__(self):
        if len(self.numerators) > self.capacity:
            raise CardinalityError(len(self.numerators), self.capacity)

    @property
    def capacity(self) -> int:
        return self.context.max_numerator

    def __len__(self):
        return len(self.numerators)

    def __iter__(self) -> Iterator[LMValue]:
        return (LMValue(k, self.context) for k in sorted(self.numerators))

    def __contains__(self, v):
        return isinstance(v, LMValue) and v.context == self.context and v.k in self.numerators

    def __str__(self):
        return "{" + ", ".join(str(v) for v in self) + "}"


def _check_value(s: BoundedSet, v: LMValue) -> None:
    if v.context != s.context:
        raise ContextMismatchError(f"value from {v.context} inserted into a set over {s.context}")


def _check_sets(a: BoundedSet, b: BoundedSet) -> None:
    if a.context != b.context:
        raise ContextMismatchError(f"sets over {a.context} and {b.context} cannot be combined")


def set_new(ctx: NumericContext, values: Iterable[LMValue] = ()) -> BoundedSet:
    s = BoundedSet(ctx)
    for v in values:
        s = set_insert(s, v)
    return s


def set_insert(s: BoundedSet, v: LMValue) -> BoundedSet:
    _check_value(s, v)
    if v.k in s.numerators:
        return s
    if len(s) + 1 > s.capacity:
        raise CardinalityError(len(s) + 1, s.capacity)
    return BoundedSet(s.context, s.numerators | {v.k})


def set_union(a: BoundedSet, b: BoundedSet) -> BoundedSet:
    _check_sets(a, b)
    merged = a.numerators | b.numerators
    if len(merged) > a.capacity:
        raise CardinalityError(len(merged), a.capacity)
    return BoundedSet(a.context, merged)


def set_intersect(a: BoundedSet, b: BoundedSet) -> BoundedSet:
    _check_sets(a, b)
    return BoundedSet(a.context, a.numerators & b.numerators)


def set_card(s: BoundedSet) -> int:
    return len(s)
