import pytest
from hypothesis import given
from hypothesis import strategies as st

from limitedmath.core import context_new
from limitedmath.errors import CardinalityError, ContextMismatchError
from limitedmath.sets import BoundedSet, set_card, set_insert, set_intersect, set_new, set_union

C1, C3 = context_new(1), context_new(2)


@pytest.mark.parametrize("ctx,cap", [(C1, 1), (C3, 9), (context_new(8), 65025)])
def test_capacity(ctx, cap):
    s = set_new(ctx)
    assert s.capacity == cap and set_card(s) == 0


def test_insert_m1():
    s = set_insert(set_new(C1), C1.value(0))
    assert set_card(s) == 1
    assert set_insert(s, C1.value(0)) == s
    with pytest.raises(CardinalityError):
        set_insert(s, C1.value(1))


def test_union():
    empty = set_new(C3)
    assert set_union(empty, empty) == empty
    a = set_new(C3, [C3.value(0), C3.value(1)])
    b = set_new(C3, [C3.value(1), C3.value(2)])
    assert str(set_union(a, b)) == "{0/3, 1/3, 2/3}"
    with pytest.raises(CardinalityError):
        set_union(set_new(C1, [C1.value(0)]), set_new(C1, [C1.value(1)]))


def test_intersect():
    a = set_new(C3, [C3.value(0), C3.value(3)])
    b = set_new(C3, [C3.value(3)])
    assert set_intersect(a, b) == b


def test_fill_to_capacity():
    s = set_new(C3)
    for k in range(-9, 0):
        s = set_insert(s, C3.value(k))
    assert set_card(s) == 9
    with pytest.raises(CardinalityError):
        set_insert(s, C3.value(0))


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        set_insert(set_new(C3), C1.value(0))
    with pytest.raises(ContextMismatchError):
        set_union(set_new(C3), set_new(C1))


def test_direct_construction_checks_capacity():
    with pytest.raises(CardinalityError):
        BoundedSet(C1, frozenset({0, 1}))


def test_iteration_ascending():
    s = set_new(C3, [C3.value(k) for k in (5, -2, 0)])
    assert [v.k for v in s] == [-2, 0, 5]
    assert C3.value(5) in s and C3.value(4) not in s


numerator_sets = st.frozensets(st.integers(-9, 9), max_size=4)


@given(numerator_sets, numerator_sets, numerator_sets)
def test_union_intersect_laws(a, b, c):
    A, B, Cs = (BoundedSet(C3, x) for x in (a, b, c))
    assert set_intersect(A, B) == set_intersect(B, A)
    assert set_intersect(set_intersect(A, B), Cs) == set_intersect(A, set_intersect(B, Cs))
    try:
        ab_c = set_union(set_union(A, B), Cs)
    except CardinalityError:
        assert len(a | b) > 9 or len(a | b | c) > 9
        return
    assert ab_c == set_union(A, set_union(B, Cs)) == set_union(Cs, set_union(B, A))


@given(st.lists(st.integers(-9, 9), max_size=30))
def test_capacity_never_exceeded(ks):
    s = set_new(C3)
    for k in ks:
        try:
            s = set_insert(s, C3.value(k))
        except CardinalityError:
            assert len(s) == 9 and k not in s.numerators
        assert len(s) <= 9
