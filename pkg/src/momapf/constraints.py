"""Vertex/edge constraints, canonical constraint sets and the frontier cache.

A vertex constraint ``<a, v, t>`` forbids agent ``a`` from occupying ``v``
at timestep ``t``; an action ``u -> v`` taken at ``t`` occupies ``v`` at
``t + 1``. An edge constraint ``<a, u, v, t>`` forbids traversing ``u -> v``
between ``t`` and ``t + 1``.
"""
from typing import Callable, Dict, Hashable, NamedTuple, Tuple

VERTEX = 0
EDGE = 1


class Constraint(NamedTuple):
    kind: int
    agent: int
    u: int
    v: int
    t: int

    @classmethod
    def vertex(cls, agent, v, t):
        return cls(VERTEX, agent, v, v, t)

    @classmethod
    def edge(cls, agent, u, v, t):
        return cls(EDGE, agent, u, v, t)

    def sort_key(self):
        return (self.kind, self.t, self.u, self.v)

    def describe(self, graph=None) -> str:
        name = graph.name if graph is not None else str
        if self.kind == VERTEX:
            return "<a%d, %s, %d>" % (self.agent, name(self.v), self.t)
        return "<a%d, %s, %s, %d>" % (self.agent, name(self.u), name(self.v), self.t)


class ConstraintSet:
    """Immutable per-agent constraint collection with a canonical encoding."""

    __slots__ = ("_by_agent", "_hash")

    def __init__(self, by_agent: Dict[int, Tuple[Constraint, ...]] = None):
        self._by_agent = dict(by_agent or {})
        self._hash = None

    @classmethod
    def of(cls, constraints) -> "ConstraintSet":
        s = cls()
        for c in constraints:
            s = s.add(c)
        return s

    def add(self, c: Constraint) -> "ConstraintSet":
        cur = self._by_agent.get(c.agent, ())
        if c in cur:
            return self
        new = dict(self._by_agent)
        new[c.agent] = tuple(sorted(cur + (c,), key=Constraint.sort_key))
        return ConstraintSet(new)

    def for_agent(self, agent: int) -> Tuple[Constraint, ...]:
        return self._by_agent.get(agent, ())

    def encoding(self) -> Tuple:
        return tuple((a, cs) for a, cs in sorted(self._by_agent.items()) if cs)

    def __iter__(self):
        for _, cs in self.encoding():
            yield from cs

    def __len__(self):
        return sum(len(cs) for cs in self._by_agent.values())

    def __contains__(self, c):
        return c in self._by_agent.get(c.agent, ())

    def __eq__(self, other):
        return isinstance(other, ConstraintSet) and self.encoding() == other.encoding()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.encoding())
        return self._hash

    def __repr__(self):
        return "ConstraintSet(%r)" % (list(self),)


EMPTY = ConstraintSet()


def forbids(cset: ConstraintSet, agent: int, action) -> bool:
    """Whether ``action = (u, v, t)`` (arriving at ``v`` at ``t + 1``) is forbidden."""
    u, v, t = action
    for c in cset.for_agent(agent):
        if c.kind == VERTEX:
            if c.v == v and c.t == t + 1:
                return True
        elif c.u == u and c.v == v and c.t == t:
            return True
    return False


class AgentConstraints:
    """Constraint lookups for one agent, indexed for the low-level search."""

    __slots__ = ("vertex", "edge", "latest", "goal_block")

    def __init__(self, constraints, goal: int):
        self.vertex = frozenset((c.v, c.t) for c in constraints if c.kind == VERTEX)
        self.edge = frozenset((c.u, c.v, c.t) for c in constraints if c.kind == EDGE)
        self.latest = max((c.t for c in constraints), default=-1)
        # latest timestep at which the goal is blocked; terminating at or before it is illegal
        self.goal_block = max((c.t for c in constraints if c.kind == VERTEX and c.v == goal),
                              default=-1)

    def blocked(self, u: int, v: int, t: int) -> bool:
        return (v, t + 1) in self.vertex or (u, v, t) in self.edge

    def can_terminate(self, t: int) -> bool:
        return t > self.goal_block


class FrontierCache:
    """Per-run table of low-level results keyed by (agent, agent's constraints)."""

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.table: Dict[Hashable, object] = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(agent: int, cset: ConstraintSet):
        return agent, cset.for_agent(agent)

    def lookup_or_compute(self, agent: int, cset: ConstraintSet, compute: Callable[[], object]):
        if not self.enabled:
            self.misses += 1
            return compute()
        k = self.key(agent, cset)
        if k in self.table:
            self.hits += 1
            return self.table[k]
        value = compute()
        self.misses += 1
        self.table[k] = value
        return value

    def __len__(self):
        return len(self.table)


def cache_lookup_or_compute(cache: FrontierCache, agent: int, cset: ConstraintSet, compute):
    return cache.lookup_or_compute(agent, cset, compute)
