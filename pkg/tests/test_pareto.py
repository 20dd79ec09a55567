import pytest
from hypothesis import given, strategies as st

from momapf.pareto import (ContractError, comax, dominates, is_nd_set, lex_compare, nd_filter,
                           weakly_dominates)


def vec(n=2):
    return st.tuples(*[st.integers(0, 20)] * n)


def test_weak_dominance_examples():
    assert weakly_dominates((3, 6), (5, 6))
    assert weakly_dominates((1, 1), (1, 1))
    assert not weakly_dominates((1, 2), (2, 1))


def test_dominance_examples():
    assert dominates((5, 6), (8, 6))
    assert not dominates((1, 1), (1, 1))
    assert dominates((0, 0), (1, 1))


def test_comax_examples():
    # (1.5,3) and (4,2) at scale 2
    assert comax((3, 6), (8, 4)) == (8, 6)
    assert comax((6, 4), (5, 6)) == (6, 6)
    assert comax((7, 1, 4), (7, 1, 4)) == (7, 1, 4)


def test_nd_filter_examples():
    assert nd_filter([(8, 6), (5, 6)]) == [(5, 6)]
    assert nd_filter([(8, 4), (6, 6)]) == [(8, 4), (6, 6)]
    assert nd_filter([(1, 1), (1, 1)]) == [(1, 1)]
    assert nd_filter([]) == []


def test_lex_compare_examples():
    assert lex_compare((13, 14), (16, 12)) == -1
    assert lex_compare((1, 2), (1, 3)) == -1
    assert lex_compare((2, 0), (1, 9)) == 1
    assert lex_compare((4, 4), (4, 4)) == 0


@pytest.mark.parametrize("fn", [weakly_dominates, dominates, comax, lex_compare])
def test_length_mismatch(fn):
    with pytest.raises(ContractError):
        fn((1, 2), (1, 2, 3))


@given(vec(), vec(), vec())
def test_comax_property(u, v, w):
    assert weakly_dominates(comax(u, v), w) == (weakly_dominates(u, w) and weakly_dominates(v, w))


@given(vec(3), vec(3))
def test_dominance_consistency(u, v):
    if dominates(u, v):
        assert weakly_dominates(u, v)
        assert not dominates(v, u)
    assert weakly_dominates(u, comax(u, v))


@given(st.lists(vec(), max_size=25))
def test_nd_filter_properties(vs):
    out = nd_filter(vs)
    assert is_nd_set(out)
    assert all(any(weakly_dominates(o, v) for o in out) for v in vs)
    assert set(out) <= set(vs)
    if out:
        best = min(out)
        assert not any(dominates(v, best) for v in vs)


def test_nd_filter_keeps_first_duplicate():
    a, b = [1, 2], (1, 2)
    out = nd_filter([a, (3, 0), b])
    assert out == [(1, 2), (3, 0)]


@given(st.lists(vec(), min_size=1, max_size=10))
def test_lex_total_order(vs):
    ordered = sorted(vs)
    for x, y in zip(ordered, ordered[1:]):
        assert lex_compare(x, y) <= 0
