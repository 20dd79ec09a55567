"""Brute-force reference solvers for small instances.

Nothing here shares search code with the planners it checks:

* `joint_pareto` searches the joint configuration space of all agents
  directly (vertex- and swap-conflicts excluded move by move). Conflicts do
  not depend on absolute time, so a joint state is just positions plus
  terminated flags and per-state dominance pruning is exact.
* `path_cost_set` computes every cost reachable by a constraint-satisfying
  single-agent path up to a horizon by set-valued dynamic programming.
* `enumerate_paths` / `enumerate_solutions` list concrete paths and
  solutions below a cost bound, for compatibility checks on CT nodes.

Lower bounds come from ``scipy.sparse.csgraph.dijkstra``.
"""
from dataclasses import dataclass
import heapq
import itertools
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .constraints import EMPTY, VERTEX, ConstraintSet, forbids
from .instance import Agent, Graph, Instance
from .lowlevel import Path
from .pareto import CostVec, nd_filter, weakly_dominates


@dataclass
class OracleResult:
    costs: List[CostVec]
    solutions: List[Tuple[Path, ...]]
    fixpoint: bool = True
    bound: Optional[CostVec] = None


def lower_bounds(graph: Graph, goal: int) -> np.ndarray:
    """``(n_vertices, n_obj)`` per-objective distances to `goal` (``inf`` if unreachable)."""
    n = graph.vertex_count
    rows, cols, data = [], [], []
    for u, v, c in graph.edges():
        if u != v:
            rows.append(v)
            cols.append(u)
            data.append(c)
    data = np.asarray(data, dtype=float).reshape(-1, graph.n_obj)
    out = np.empty((n, graph.n_obj))
    for k in range(graph.n_obj):
        # zero weights would vanish from a sparse matrix; shift by a tiny epsilon and round back
        w = data[:, k] + 1e-9
        mat = csr_matrix((w, (rows, cols)), shape=(n, n))
        d = dijkstra(mat, directed=True, indices=goal)
        out[:, k] = np.where(np.isinf(d), np.inf, np.floor(d + 1e-6))
    return out


def _satisfies(cset: ConstraintSet, agent: int, vertices: Sequence[int]) -> bool:
    for t in range(len(vertices) - 1):
        if forbids(cset, agent, (vertices[t], vertices[t + 1], t)):
            return False
    arrival = len(vertices) - 1
    goal = vertices[-1]
    return not any(c.kind == VERTEX and c.v == goal and c.t >= arrival
                   for c in cset.for_agent(agent))


def path_satisfies(cset: ConstraintSet, agent: int, path: Path) -> bool:
    """Every action allowed and the terminate clears later goal constraints."""
    return _satisfies(cset, agent, path.vertices)


# ---------------------------------------------------------------------------
# single agent

def path_cost_set(graph: Graph, agent: Agent, cset: ConstraintSet = EMPTY, horizon: int = 12,
                  prune: bool = False):
    """All costs of constraint-satisfying paths terminating at t <= horizon.

    With `prune`, dominated costs are dropped within each (vertex, t) layer;
    they share every continuation, so the nondominated result is unchanged.
    """
    goal = agent.goal
    layer: Dict[int, set] = {agent.start: {(0,) * graph.n_obj}}
    out = set()
    block = max((c.t for c in cset.for_agent(agent.id) if c.kind == VERTEX and c.v == goal),
                default=-1)
    for t in range(horizon + 1):
        if t > block and goal in layer:
            out |= layer[goal]
        if t == horizon:
            break
        nxt: Dict[int, set] = {}
        for u, costs in layer.items():
            for v, c in graph.adj[u]:
                if forbids(cset, agent.id, (u, v, t)):
                    continue
                bucket = nxt.setdefault(v, set())
                bucket.update(tuple(a + b for a, b in zip(g, c)) for g in costs)
        if prune:
            nxt = {v: set(nd_filter(sorted(b))) for v, b in nxt.items()}
        layer = nxt
    return out


def single_agent_frontier(graph: Graph, agent: Agent, cset: ConstraintSet = EMPTY,
                          horizon: int = 12) -> List[CostVec]:
    return sorted(nd_filter(sorted(path_cost_set(graph, agent, cset, horizon, prune=True))))


def enumerate_paths(graph: Graph, agent: Agent, bound: CostVec, cset: ConstraintSet = EMPTY,
                    lb=None) -> List[Path]:
    """Every constraint-satisfying path with cost weakly dominated by `bound`."""
    if lb is None:
        lb = lower_bounds(graph, agent.goal)
    bound = tuple(bound)
    out = []
    stack = [((agent.start,), (0,) * graph.n_obj)]
    while stack:
        verts, g = stack.pop()
        v = verts[-1]
        if v == agent.goal and _satisfies(cset, agent.id, verts):
            out.append(Path(verts, g))
        t = len(verts) - 1
        for w, c in graph.adj[v]:
            if forbids(cset, agent.id, (v, w, t)):
                continue
            ng = tuple(a + b for a, b in zip(g, c))
            if any(ng[k] + lb[w, k] > bound[k] for k in range(len(ng))):
                continue
            if sum(c) == 0:
                raise ValueError("zero-cost action makes enumeration unbounded")
            stack.append((verts + (w,), ng))
    out.sort(key=lambda p: (p.cost, p.vertices))
    return out


# ---------------------------------------------------------------------------
# joint space

def conflict_free(paths: Sequence[Path]) -> bool:
    horizon = max(p.arrival for p in paths)
    for t in range(horizon + 1):
        here = [p.at(t) for p in paths]
        if len(set(here)) != len(here):
            return False
        if t < horizon:
            nxt = [p.at(t + 1) for p in paths]
            for i, j in itertools.combinations(range(len(paths)), 2):
                if here[i] != nxt[i] and here[i] == nxt[j] and here[j] == nxt[i]:
                    return False
    return True


def _joint_moves(graph, agents, pos, done):
    """Joint successor configurations: ``(new_pos, new_done, cost)``."""
    m = len(agents)
    n_obj = graph.n_obj
    zero = (0,) * n_obj
    options = []
    for i in range(m):
        if done[i]:
            options.append([(pos[i], True, zero)])
            continue
        opts = [(w, False, c) for w, c in graph.adj[pos[i]]]
        if pos[i] == agents[i].goal:
            opts.append((pos[i], True, zero))
        options.append(opts)

    def rec(i, new_pos, new_done, cost):
        if i == m:
            yield tuple(new_pos), tuple(new_done), cost
            return
        for w, d, c in options[i]:
            clash = False
            for j in range(i):
                if new_pos[j] == w or (w == pos[j] and new_pos[j] == pos[i] and w != pos[i]):
                    clash = True
                    break
            if clash:
                continue
            new_pos.append(w)
            new_done.append(d)
            yield from rec(i + 1, new_pos, new_done, tuple(a + b for a, b in zip(cost, c)))
            new_pos.pop()
            new_done.pop()

    return rec(0, [], [], zero)


def _joint_search(instance: Instance, bound: Optional[CostVec]):
    graph, agents = instance.graph, instance.agents
    lbs = [lower_bounds(graph, a.goal) for a in agents]
    n_obj = graph.n_obj
    if any(np.isinf(lbs[i][a.start, 0]) for i, a in enumerate(agents)):
        return [], []

    def h(pos, done):
        out = [0] * n_obj
        for i, v in enumerate(pos):
            if not done[i]:
                for k in range(n_obj):
                    out[k] += lbs[i][v, k]
        return out

    start = (tuple(a.start for a in agents), tuple(False for _ in agents))
    found: List[CostVec] = []
    found_states = []
    labels: Dict = {}
    heap = []
    counter = itertools.count()

    def push(state, g, parent):
        hv = h(*state)
        if any(x == np.inf for x in hv):
            return
        f = tuple(int(a + b) for a, b in zip(g, hv))
        if bound is not None and any(a > b for a, b in zip(f, bound)):
            return
        if any(weakly_dominates(s, f) for s in found):
            return
        bucket = labels.setdefault(state, [])
        if any(weakly_dominates(o[0], g) for o in bucket if not o[2][0]):
            return
        for o in bucket:
            if weakly_dominates(g, o[0]):
                o[2][0] = True
        entry = (g, parent, [False], state)
        labels[state] = [o for o in bucket if not o[2][0]] + [entry]
        heapq.heappush(heap, (f, next(counter), entry))

    push(start, (0,) * n_obj, None)
    while heap:
        f, _, entry = heapq.heappop(heap)
        g, parent, dead, state = entry
        if dead[0] or any(weakly_dominates(s, f) for s in found):
            continue
        pos, done = state
        if all(done):
            found.append(g)
            found_states.append(entry)
            continue
        for npos, ndone, c in _joint_moves(graph, agents, pos, done):
            push((npos, ndone), tuple(a + b for a, b in zip(g, c)), entry)

    solutions = []
    for entry in found_states:
        chain = []
        while entry is not None:
            chain.append(entry[3])
            entry = entry[1]
        chain.reverse()
        paths = []
        for i in range(len(agents)):
            verts = [pos[i] for pos, done in chain if not done[i]]
            paths.append(Path(tuple(verts), _cost(graph, verts)))
        solutions.append(tuple(paths))
    return found, solutions


def _cost(graph, verts):
    total = [0] * graph.n_obj
    for u, v in zip(verts, verts[1:]):
        for k, x in enumerate(graph.edge_cost(u, v)):
            total[k] += x
    return tuple(total)


def default_bound(instance: Instance) -> CostVec:
    """Sum over agents of each agent's componentwise-largest frontier cost."""
    total = [0] * instance.n_obj
    for a in instance.agents:
        solo = Instance(instance.graph, (Agent(0, a.start, a.goal),))
        costs, _ = _joint_search(solo, None)
        for k in range(instance.n_obj):
            total[k] += max((c[k] for c in costs), default=0)
    return tuple(total)


def joint_pareto(instance: Instance, cost_bound: Optional[CostVec] = None,
                 auto_bound: bool = False, max_doublings: int = 6) -> OracleResult:
    """Cost-unique Pareto frontier of conflict-free solutions by joint search.

    Without a bound the search is exact on its own. With `cost_bound` (or
    `auto_bound`) solutions whose cost exceeds the bound are discarded; the
    bound is doubled until a nonempty frontier stops changing, and
    ``fixpoint`` is False when `max_doublings` runs out first.
    """
    if cost_bound is None and not auto_bound:
        costs, sols = _joint_search(instance, None)
        return OracleResult(costs, sols, True, None)
    bound = tuple(cost_bound) if cost_bound is not None else default_bound(instance)
    costs, sols = _joint_search(instance, bound)
    for _ in range(max_doublings):
        bigger = tuple(2 * b for b in bound)
        costs2, sols2 = _joint_search(instance, bigger)
        # an empty result under a bound proves nothing, so keep growing it
        if costs2 == costs and costs:
            return OracleResult(costs, sols, True, bound)
        bound, costs, sols = bigger, costs2, sols2
    return OracleResult(costs, sols, False, bound)


def enumerate_solutions(instance: Instance, bound: CostVec, csets=None) -> List[Tuple[Path, ...]]:
    """All conflict-free solutions whose total cost is weakly dominated by `bound`."""
    graph, agents = instance.graph, instance.agents
    lbs = [lower_bounds(graph, a.goal) for a in agents]
    ideal = [tuple(int(x) for x in lbs[i][a.start]) for i, a in enumerate(agents)]
    per_agent = []
    for i, a in enumerate(agents):
        others = [sum(ideal[j][k] for j in range(len(agents)) if j != i)
                  for k in range(graph.n_obj)]
        b = tuple(bound[k] - others[k] for k in range(graph.n_obj))
        cset = EMPTY if csets is None else csets[i]
        per_agent.append(enumerate_paths(graph, a, b, cset, lbs[i]))
    out = []
    for combo in itertools.product(*per_agent):
        total = tuple(sum(p.cost[k] for p in combo) for k in range(graph.n_obj))
        if all(a <= b for a, b in zip(total, bound)) and conflict_free(combo):
            out.append(combo)
    return out


# ---------------------------------------------------------------------------
# compatibility with CT nodes

def path_compatible(node, i: int, path: Path) -> bool:
    """Definition of compatibility: constraints, then ``lb`` and ``ub`` if the node has them."""
    if not path_satisfies(node.constraints, i, path):
        return False
    if node.lb is not None and not weakly_dominates(node.lb[i], path.cost):
        return False
    if node.ub is not None and any(weakly_dominates(u, path.cost) for u in node.ub[i]):
        return False
    return True


def solution_compatible(node, solution: Sequence[Path]) -> bool:
    return all(path_compatible(node, i, p) for i, p in enumerate(solution))


def enumerate_compatible(instance: Instance, node, cost_bound: CostVec) -> List[Tuple[Path, ...]]:
    return [s for s in enumerate_solutions(instance, cost_bound)
            if solution_compatible(node, s)]


def solvable_random_instances(count: int, first_seed: int = 0, **kw):
    """``(seed, instance, oracle_result)`` for the first `count` seeds with a solution.

    Seeds whose instance has no conflict-free solution are skipped: the
    constraint-tree search does not terminate on those.
    """
    from .instance import random_small_instance
    out = []
    seed = first_seed
    while len(out) < count:
        inst = random_small_instance(seed, **kw)
        res = joint_pareto(inst)
        if res.costs:
            out.append((seed, inst, res))
        seed += 1
    return out
