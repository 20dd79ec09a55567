"""Constraint-tree search over per-agent Pareto paths (MO-CBS).

Three splitting strategies share one best-first loop:

``standard``
    one child per path of the replanned frontier.
``cost``
    children carry a per-agent cost lower bound ``lb``; one child per
    nondominated ``comax(lb, c(path))``.
``disjoint``
    additionally carries per-agent upper-bound sets ``ub`` so that the
    children of a split cover disjoint cost regions; children whose ``lb``
    falls inside their own ``ub`` are discarded.

Open is ordered lexicographically by node cost, ties going to the node
generated first. Conflicts are selected by earliest timestep, then lowest
agent pair, vertex before edge. Terminated agents occupy their goal forever.
"""
from dataclasses import dataclass, field, replace
import heapq
import itertools
import json
from operator import le
import time
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .constraints import EMPTY, Constraint, ConstraintSet
from .instance import Instance
from .lowlevel import LowLevel, Path
from .pareto import CostVec, comax, nd_filter, nd_filter_tagged, vec_sum

STRATEGIES = ("standard", "cost", "disjoint")

COMPLETE = "complete"
TIMEOUT = "timeout"
EXPANSION_LIMIT = "expansion-limit"


class Conflict(NamedTuple):
    kind: int          # 0 vertex, 1 edge (same codes as constraints)
    i: int
    j: int
    u: int             # vertex conflicts: u == v
    v: int
    t: int             # vertex: occupancy time; edge: departure time

    def constraints(self) -> List[Tuple[int, Constraint]]:
        """The constraint for each involved agent, agent `i` first."""
        if self.kind == 0:
            return [(self.i, Constraint.vertex(self.i, self.v, self.t)),
                    (self.j, Constraint.vertex(self.j, self.v, self.t))]
        return [(self.i, Constraint.edge(self.i, self.u, self.v, self.t)),
                (self.j, Constraint.edge(self.j, self.v, self.u, self.t))]


@dataclass(eq=False)
class CTNode:
    constraints: ConstraintSet
    paths: Tuple[Path, ...]
    cost: CostVec
    lb: Optional[Tuple[CostVec, ...]] = None
    ub: Optional[Tuple[Tuple[CostVec, ...], ...]] = None
    seq: int = -1
    parent: int = -1
    depth: int = 0

    def with_path(self, i: int, path: Path, cset: ConstraintSet, lb=None, ub=None) -> "CTNode":
        paths = self.paths[:i] + (path,) + self.paths[i + 1:]
        cost = tuple(c - a + b for c, a, b in zip(self.cost, self.paths[i].cost, path.cost))
        new_lb, new_ub = self.lb, self.ub
        if lb is not None:
            new_lb = self.lb[:i] + (lb,) + self.lb[i + 1:]
        if ub is not None:
            new_ub = self.ub[:i] + (tuple(ub),) + self.ub[i + 1:]
        return CTNode(cset, paths, cost, new_lb, new_ub, -1, self.seq, self.depth + 1)


@dataclass
class SearchStats:
    roots: int = 0
    expansions: int = 0
    pops: int = 0
    generations: int = 0
    split_children: List[int] = field(default_factory=list)
    pruned_pop: int = 0
    pruned_add: int = 0
    low_level_calls: int = 0
    low_level_searches: int = 0
    cache_hits: int = 0
    wall_time: float = 0.0

    @property
    def branching_factor(self) -> Optional[float]:
        if not self.split_children:
            return None
        return sum(self.split_children) / len(self.split_children)

    def as_dict(self) -> dict:
        return {
            "roots": self.roots, "expansions": self.expansions, "pops": self.pops,
            "generations": self.generations, "split_children": list(self.split_children),
            "branching_factor": self.branching_factor,
            "pruned_pop": self.pruned_pop, "pruned_add": self.pruned_add,
            "low_level_calls": self.low_level_calls,
            "low_level_searches": self.low_level_searches,
            "cache_hits": self.cache_hits, "wall_time": self.wall_time,
        }


@dataclass
class Solution:
    cost: CostVec
    paths: Tuple[Path, ...]


@dataclass
class Result:
    solutions: List[Solution]
    stats: SearchStats
    status: str
    unsolvable: bool = False

    @property
    def costs(self) -> List[CostVec]:
        return [s.cost for s in self.solutions]


class Timeout(Exception):
    pass


# ---------------------------------------------------------------------------
# conflicts

def occupancy(path: Path, t: int) -> int:
    return path.at(t)


def detect_first_conflict(paths: Sequence[Path]) -> Optional[Conflict]:
    verts = [p.vertices for p in paths]
    last = [len(v) - 1 for v in verts]
    horizon = max(last)
    m = len(paths)
    here = [v[0] for v in verts]
    for t in range(horizon + 1):
        found = []
        if t > 0 and len(set(here)) < m:
            seen = {}
            for i, v in enumerate(here):
                seen.setdefault(v, []).append(i)
            for v, ags in seen.items():
                for a, b in itertools.combinations(ags, 2):
                    found.append(Conflict(0, a, b, v, v, t))
        if t < horizon:
            nxt = [v[t + 1] if t < n else v[n] for v, n in zip(verts, last)]
            moves = {}
            for i in range(m):
                u, v = here[i], nxt[i]
                if u != v:
                    moves.setdefault((u, v), []).append(i)
            for (u, v), ags in moves.items():
                for b in moves.get((v, u), ()):
                    for a in ags:
                        if a < b:
                            found.append(Conflict(1, a, b, u, v, t))
            here = nxt
        if found:
            return min(found, key=lambda c: (c.i, c.j, c.kind))
    return None


def dominated_by_solutions(solution_costs: Iterable[CostVec], cost: CostVec) -> bool:
    return any(all(map(le, s, cost)) for s in solution_costs)


# ---------------------------------------------------------------------------
# roots and splitting

def root_upper_bounds(costs: Sequence[CostVec]) -> List[Tuple[CostVec, ...]]:
    """``ub`` for the j-th lexicographically sorted frontier path."""
    return [tuple(nd_filter(comax(costs[j], costs[k]) for k in range(j))) for j in range(len(costs))]


def init_roots(instance: Instance, low: LowLevel, mode: str, deadline: float = None):
    """Root CT nodes (without sequence numbers) and an unsolvable flag."""
    if mode not in STRATEGIES:
        raise ValueError("unknown strategy %r" % mode)
    frontiers = []
    for a in instance.agents:
        fr = sorted(low.frontier(a.id, EMPTY), key=lambda p: p.cost)
        if not fr:
            return [], True
        frontiers.append(fr)
        if deadline is not None and time.perf_counter() > deadline:
            raise Timeout
    ubs = [root_upper_bounds([p.cost for p in fr]) for fr in frontiers]
    roots = []
    for combo in itertools.product(*(range(len(fr)) for fr in frontiers)):
        paths = tuple(frontiers[i][k] for i, k in enumerate(combo))
        cost = vec_sum((p.cost for p in paths), instance.n_obj)
        lb = ub = None
        if mode != "standard":
            lb = tuple(p.cost for p in paths)
        if mode == "disjoint":
            ub = tuple(ubs[i][k] for i, k in enumerate(combo))
        roots.append(CTNode(EMPTY, paths, cost, lb, ub))
        if deadline is not None and len(roots) % 1024 == 0 and time.perf_counter() > deadline:
            raise Timeout
    return roots, False


def split_standard(node: CTNode, conflict: Conflict, low: LowLevel, sides=None) -> List[CTNode]:
    children = []
    for i, cons in conflict.constraints():
        cset = node.constraints.add(cons)
        frontier = low.frontier(i, cset)
        kids = [node.with_path(i, p, cset) for p in frontier]
        if sides is not None:
            sides.append((i, cons, len(frontier), kids))
        children.extend(kids)
    return children


def _lower_bounds(node_lb: CostVec, frontier):
    """Nondominated ``comax(node_lb, c(path))`` with the first witness path for each."""
    return nd_filter_tagged((comax(node_lb, p.cost), p) for p in frontier)


def split_cost(node: CTNode, conflict: Conflict, low: LowLevel, sides=None) -> List[CTNode]:
    children = []
    for i, cons in conflict.constraints():
        cset = node.constraints.add(cons)
        frontier = low.frontier(i, cset)
        kids = [node.with_path(i, p, cset, lb=lb) for lb, p in _lower_bounds(node.lb[i], frontier)]
        if sides is not None:
            sides.append((i, cons, len(frontier), kids))
        children.extend(kids)
    return children


def split_disjoint(node: CTNode, conflict: Conflict, low: LowLevel, sides=None) -> List[CTNode]:
    children = []
    for i, cons in conflict.constraints():
        cset = node.constraints.add(cons)
        frontier = low.frontier(i, cset)
        bounds = list(node.ub[i])
        kids = []
        for lb, p in sorted(_lower_bounds(node.lb[i], frontier), key=lambda x: x[0]):
            ub = nd_filter(comax(lb, v) for v in bounds)
            if lb in ub:
                continue
            kids.append(node.with_path(i, p, cset, lb=lb, ub=ub))
            bounds.append(lb)
        if sides is not None:
            sides.append((i, cons, len(frontier), kids))
        children.extend(kids)
    return children


SPLITTERS = {"standard": split_standard, "cost": split_cost, "disjoint": split_disjoint}


def as_mode(node: CTNode, mode: str) -> CTNode:
    """`node` with the bound fields `mode` needs; missing bounds default to
    ``lb = c(path)`` and ``ub = {}`` as at a fresh root."""
    lb, ub = node.lb, node.ub
    if mode == "standard":
        return node
    if lb is None:
        lb = tuple(p.cost for p in node.paths)
    if mode == "disjoint" and ub is None:
        ub = tuple(() for _ in node.paths)
    if mode == "cost":
        ub = None
    return replace(node, lb=lb, ub=ub)


# ---------------------------------------------------------------------------
# trace

class TraceLog:
    """Collects search events; `to_jsonl` renders them one JSON object per line."""

    def __init__(self, graph=None):
        self.events = []
        self.graph = graph

    def __call__(self, kind: str, **data):
        self.events.append(dict(data, event=kind))

    def of(self, kind: str):
        return [e for e in self.events if e["event"] == kind]

    def _node(self, node: CTNode) -> dict:
        d = {"seq": node.seq, "parent": node.parent, "cost": list(node.cost)}
        if node.lb is not None:
            d["lb"] = [list(x) for x in node.lb]
        if node.ub is not None:
            d["ub"] = [[list(x) for x in u] for u in node.ub]
        return d

    def record(self, e: dict) -> dict:
        out = {"event": e["event"]}
        if "node" in e:
            out.update(self._node(e["node"]))
        if "where" in e:
            out["where"] = e["where"]
        if "conflict" in e:
            c = e["conflict"]
            out["conflict"] = {"kind": "vertex" if c.kind == 0 else "edge", "agents": [c.i, c.j],
                               "u": c.u, "v": c.v, "t": c.t}
        if "sides" in e:
            out["sides"] = [{"agent": i, "constraint": list(cons), "frontier": n,
                             "children": [k.seq for k in kids]}
                            for i, cons, n, kids in e["sides"]]
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(self.record(e), sort_keys=True) + "\n" for e in self.events)


# ---------------------------------------------------------------------------
# main loop

def solve(instance: Instance, strategy: str = "disjoint", time_limit: Optional[float] = None,
          max_expansions: Optional[int] = None, use_heuristic: bool = True,
          use_cache: bool = True, trace=None, low: Optional[LowLevel] = None) -> Result:
    """Cost-unique Pareto frontier of conflict-free solutions.

    Returns a partial frontier with status ``timeout`` or ``expansion-limit``
    when a limit is hit first.
    """
    if strategy not in STRATEGIES:
        raise ValueError("unknown strategy %r" % strategy)
    split = SPLITTERS[strategy]
    low = low or LowLevel(instance, use_heuristic=use_heuristic, use_cache=use_cache)
    stats = SearchStats()
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    solutions: List[Solution] = []
    found: List[CostVec] = []
    status = COMPLETE
    unsolvable = False
    emit = trace or (lambda kind, **data: None)
    seq = itertools.count()

    def finish():
        stats.wall_time = time.perf_counter() - t0
        stats.low_level_calls = low.calls
        stats.low_level_searches = low.searches
        stats.cache_hits = low.cache.hits
        return Result(solutions, stats, status, unsolvable)

    try:
        roots, unsolvable = init_roots(instance, low, strategy, deadline)
    except Timeout:
        status = TIMEOUT
        return finish()
    open_list = []
    for r in roots:
        r.seq = next(seq)
        emit("root", node=r)
        heapq.heappush(open_list, (r.cost, r.seq, r))
    stats.roots = stats.generations = len(roots)

    while open_list:
        if deadline is not None and time.perf_counter() > deadline:
            status = TIMEOUT
            break
        if max_expansions is not None and stats.expansions >= max_expansions:
            status = EXPANSION_LIMIT
            break
        _, _, node = heapq.heappop(open_list)
        stats.pops += 1
        emit("pop", node=node)
        if dominated_by_solutions(found, node.cost):
            stats.pruned_pop += 1
            emit("prune", node=node, where="pop")
            continue
        conflict = detect_first_conflict(node.paths)
        if conflict is None:
            solutions.append(Solution(node.cost, node.paths))
            found.append(node.cost)
            emit("solution", node=node)
            continue
        sides = []
        children = split(node, conflict, low, sides)
        for c in children:
            c.seq = next(seq)
        stats.expansions += 1
        stats.split_children.append(len(children))
        stats.generations += len(children)
        emit("split", node=node, conflict=conflict, sides=sides, children=children)
        for child in children:
            if dominated_by_solutions(found, child.cost):
                stats.pruned_add += 1
                emit("prune", node=child, where="add")
                continue
            emit("child", node=child)
            heapq.heappush(open_list, (child.cost, child.seq, child))
    return finish()
