"""Constrained multi-objective single-agent planning.

`pareto_paths` is a label-setting search over space-time states that
returns one witness path per cost of the exact cost-unique Pareto frontier.

States are ``(vertex, min(t, T_cap))`` where ``T_cap`` is one past the
agent's latest constrained timestep: beyond it no constraint can apply,
so time is dropped and the state space is finite. Every action has a
nonzero cost in some component, so a label returning to a collapsed state
is weakly dominated there; together these bound the search.

Labels are popped in lexicographic order of ``(f, key)`` where ``key`` is
the action sequence ranked per step by (moves before waits, then target
vertex id). Both parts are monotone along extensions, which makes the first
path found for each frontier cost the smallest such path under that order.
"""
from dataclasses import dataclass
import heapq
import math
from operator import le
from typing import List, Optional, Sequence, Tuple

from .constraints import EMPTY, AgentConstraints, ConstraintSet, FrontierCache
from .instance import Agent, Graph, Instance
from .pareto import CostVec

INF = math.inf


@dataclass(frozen=True)
class Path:
    """Vertices visited at t = 0, 1, ...; the agent terminates at the last one."""

    vertices: Tuple[int, ...]
    cost: CostVec

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def goal(self) -> int:
        return self.vertices[-1]

    @property
    def arrival(self) -> int:
        """Timestep of the terminate action."""
        return len(self.vertices) - 1

    def at(self, t: int) -> int:
        return self.vertices[min(t, len(self.vertices) - 1)]

    def actions(self):
        """``(u, v, t)`` moves, excluding the final terminate."""
        vs = self.vertices
        return [(vs[k], vs[k + 1], k) for k in range(len(vs) - 1)]

    def names(self, graph: Graph) -> List[str]:
        return [graph.name(v) for v in self.vertices]


def path_cost(graph: Graph, vertices: Sequence[int]) -> CostVec:
    total = [0] * graph.n_obj
    for u, v in zip(vertices, vertices[1:]):
        for k, x in enumerate(graph.edge_cost(u, v)):
            total[k] += x
    return tuple(total)


def make_path(graph: Graph, vertices) -> Path:
    vertices = tuple(graph.vertex(v) for v in vertices)
    return Path(vertices, path_cost(graph, vertices))


def compute_heuristic(graph: Graph, goal: int):
    """Per-objective shortest distance to `goal`; ``inf`` where unreachable."""
    n = graph.vertex_count
    radj = [[] for _ in range(n)]
    for u, v, c in graph.edges():
        if u != v:
            radj[v].append((u, c))
    table = [[INF] * graph.n_obj for _ in range(n)]
    for k in range(graph.n_obj):
        dist = [INF] * n
        dist[goal] = 0
        heap = [(0, goal)]
        while heap:
            d, v = heapq.heappop(heap)
            if d > dist[v]:
                continue
            for u, c in radj[v]:
                nd = d + c[k]
                if nd < dist[u]:
                    dist[u] = nd
                    heapq.heappush(heap, (nd, u))
        for v in range(n):
            table[v][k] = dist[v]
    return [tuple(row) for row in table]


def zero_heuristic(graph: Graph, goal: int):
    """Zero everywhere goal-reachable, ``inf`` elsewhere (keeps dead-end pruning)."""
    h = compute_heuristic(graph, goal)
    zero = (0,) * graph.n_obj
    return [zero if row[0] != INF else row for row in h]


class _Label:
    __slots__ = ("g", "f", "key", "v", "t", "parent", "dead", "closed")

    def __init__(self, g, f, key, v, t, parent):
        self.g, self.f, self.key, self.v, self.t, self.parent = g, f, key, v, t, parent
        self.dead = False
        self.closed = False


def _vertices(label) -> Tuple[int, ...]:
    out = []
    while label is not None:
        out.append(label.v)
        label = label.parent
    return tuple(reversed(out))


def pareto_paths(graph: Graph, agent: Agent, cset: ConstraintSet = EMPTY, h=None,
                 stats: Optional[dict] = None) -> List[Path]:
    """Cost-unique Pareto frontier of paths for `agent` under `cset`.

    Paths come back in lexicographic order of cost. An empty list means no
    path satisfies the constraints.
    """
    if h is None:
        h = compute_heuristic(graph, agent.goal)
    ac = AgentConstraints(cset.for_agent(agent.id), agent.goal)
    t_cap = ac.latest + 1
    n_obj = graph.n_obj
    adj = graph.adj
    found: List[Path] = []
    found_costs: List[CostVec] = []
    records = {}
    heap = []
    counter = 0
    expanded = 0

    def covered(f):
        return any(all(map(le, c, f)) for c in found_costs)

    def push(g, v, t, key, parent):
        nonlocal counter
        hv = h[v]
        if hv[0] == INF:
            return
        f = tuple(a + b for a, b in zip(g, hv))
        if covered(f):
            return
        state = (v, t if t < t_cap else t_cap)
        bucket = records.setdefault(state, [])
        for other in bucket:
            if other.dead:
                continue
            og = other.g
            if all(a <= b for a, b in zip(og, g)):
                # equal cost: an open label with a larger key is replaced
                if og == g and not other.closed and key < other.key:
                    other.dead = True
                    continue
                return
        lab = _Label(g, f, key, v, t, parent)
        keep = []
        for other in bucket:
            if other.dead:
                continue
            if all(a <= b for a, b in zip(g, other.g)):
                other.dead = True
                continue
            keep.append(other)
        keep.append(lab)
        records[state] = keep
        counter += 1
        heapq.heappush(heap, (f, key, counter, lab))

    push((0,) * n_obj, agent.start, 0, (), None)
    while heap:
        f, key, _, lab = heapq.heappop(heap)
        if lab.dead or covered(f):
            continue
        lab.closed = True
        v, t = lab.v, lab.t
        if v == agent.goal and ac.can_terminate(t):
            found.append(Path(_vertices(lab), lab.g))
            found_costs.append(lab.g)
            continue
        expanded += 1
        check = t < t_cap
        g = lab.g
        for w, c in adj[v]:
            if check and ac.blocked(v, w, t):
                continue
            push(tuple(a + b for a, b in zip(g, c)), w, t + 1,
                 key + ((1 if w == v else 0, w),), lab)
    if stats is not None:
        stats["expanded"] = stats.get("expanded", 0) + expanded
        stats["generated"] = stats.get("generated", 0) + counter
    return found


class LowLevel:
    """Low-level planner bound to one instance, with heuristics and a cache."""

    def __init__(self, instance: Instance, use_heuristic: bool = True, use_cache: bool = True):
        self.instance = instance
        self.graph = instance.graph
        self.use_heuristic = use_heuristic
        self.cache = FrontierCache(enabled=use_cache)
        self._h = {}
        self.calls = 0       # frontier requests
        self.searches = 0    # actual searches run
        self.search_stats = {}

    def heuristic(self, agent_id: int):
        if agent_id not in self._h:
            goal = self.instance.agents[agent_id].goal
            fn = compute_heuristic if self.use_heuristic else zero_heuristic
            self._h[agent_id] = fn(self.graph, goal)
        return self._h[agent_id]

    def plan(self, agent_id: int, cset: ConstraintSet) -> Tuple[Path, ...]:
        self.searches += 1
        agent = self.instance.agents[agent_id]
        return tuple(pareto_paths(self.graph, agent, cset, self.heuristic(agent_id),
                                  self.search_stats))

    def frontier(self, agent_id: int, cset: ConstraintSet = EMPTY) -> Tuple[Path, ...]:
        self.calls += 1
        return self.cache.lookup_or_compute(agent_id, cset, lambda: self.plan(agent_id, cset))


def frontier_for(low: LowLevel, agent_id: int, cset: ConstraintSet) -> Tuple[Path, ...]:
    return low.frontier(agent_id, cset)
