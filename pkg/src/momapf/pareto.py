"""Exact vector-cost algebra.

Cost vectors are plain tuples of non-negative integers (fixed-point units).
Everything here is a pure function so vectors can be shared freely.
"""
from typing import Iterable, Sequence, Tuple

CostVec = Tuple[int, ...]


class ContractError(ValueError):
    """Raised when an operation's precondition is violated."""


def _check(u: Sequence, v: Sequence) -> None:
    if len(u) != len(v):
        raise ContractError("cost vectors differ in length: %d vs %d" % (len(u), len(v)))


def weakly_dominates(u: CostVec, v: CostVec) -> bool:
    _check(u, v)
    return all(a <= b for a, b in zip(u, v))


def dominates(u: CostVec, v: CostVec) -> bool:
    _check(u, v)
    return weakly_dominates(u, v) and tuple(u) != tuple(v)


def comax(u: CostVec, v: CostVec) -> CostVec:
    _check(u, v)
    return tuple(max(a, b) for a, b in zip(u, v))


def vec_add(u: CostVec, v: CostVec) -> CostVec:
    _check(u, v)
    return tuple(a + b for a, b in zip(u, v))


def vec_sum(vs: Iterable[CostVec], n: int) -> CostVec:
    total = (0,) * n
    for v in vs:
        total = vec_add(total, v)
    return total


def lex_compare(u: CostVec, v: CostVec) -> int:
    """Return -1, 0 or 1 as `u` is lexicographically less, equal or greater."""
    _check(u, v)
    u, v = tuple(u), tuple(v)
    return (u > v) - (u < v)


def nd_filter(vs: Iterable[CostVec]) -> list:
    """Nondominated, cost-unique subset of `vs` in input order.

    Among equal vectors the earliest occurrence is kept.
    """
    kept = []
    for v in vs:
        v = tuple(v)
        if any(weakly_dominates(k, v) for k in kept):
            continue
        kept = [k for k in kept if not dominates(v, k)]
        kept.append(v)
    return kept


def nd_filter_tagged(items):
    """Like :func:`nd_filter` but over ``(cost, payload)`` pairs."""
    kept = []
    for cost, payload in items:
        cost = tuple(cost)
        if any(weakly_dominates(k, cost) for k, _ in kept):
            continue
        kept = [(k, p) for k, p in kept if not dominates(cost, k)]
        kept.append((cost, payload))
    return kept


def weakly_dominated_by_any(pool: Iterable[CostVec], v: CostVec) -> bool:
    return any(weakly_dominates(p, v) for p in pool)


def is_nd_set(vs: Sequence[CostVec]) -> bool:
    """True iff `vs` is pairwise nondominated and cost-unique."""
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            if weakly_dominates(a, b) or weakly_dominates(b, a):
                return False
    return True
