"""Problem instances: graphs with vector edge costs, agents, grid maps.

Grid maps and scenarios use the MovingAI benchmark text formats. Graph
construction from a grid supports the three objective generators used in
the experiments (``random-bi``, ``random-tri``, ``time-energy``) plus
flowtime augmentation.

Cell coordinates are ``(x, y)`` = (column, row), as in MovingAI files.
"""
from dataclasses import dataclass, field
import json
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .pareto import ContractError, CostVec

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OT")

# move order used when building grid graphs; the wait (self-loop) comes last
DIRECTIONS = (("N", 0, -1), ("S", 0, 1), ("W", -1, 0), ("E", 1, 0))

OBJECTIVE_COUNTS = {"random-bi": 2, "random-tri": 3, "time-energy": 2}


class ParseError(ValueError):
    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            msg = "line %d: %s" % (lineno, msg)
        super().__init__(msg)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Directed graph with integer vector costs and one self-loop per vertex.

    ``adj[u]`` is a tuple of ``(v, cost)`` pairs. Costs are fixed-point:
    real cost = units / ``scale``.
    """

    adj: Tuple[Tuple[Tuple[int, CostVec], ...], ...]
    n_obj: int
    scale: int = 1
    names: Optional[Tuple[str, ...]] = None
    coords: Optional[Tuple[Tuple[int, int], ...]] = None
    meta: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_obj < 1:
            raise ContractError("need at least one objective")
        for u, edges in enumerate(self.adj):
            loops = 0
            for v, c in edges:
                if not 0 <= v < len(self.adj):
                    raise ContractError("edge %d->%d leaves the graph" % (u, v))
                if len(c) != self.n_obj or min(c) < 0:
                    raise ContractError("bad cost %r on edge %d->%d" % (c, u, v))
                loops += v == u
            if loops != 1:
                raise ContractError("vertex %d must have exactly one self-loop" % u)

    @property
    def vertex_count(self) -> int:
        return len(self.adj)

    def edges(self):
        for u, out in enumerate(self.adj):
            for v, c in out:
                yield u, v, c

    def edge_cost(self, u: int, v: int) -> CostVec:
        for w, c in self.adj[u]:
            if w == v:
                return c
        raise KeyError((u, v))

    def has_edge(self, u: int, v: int) -> bool:
        return any(w == v for w, _ in self.adj[u])

    def name(self, v: int) -> str:
        return self.names[v] if self.names else str(v)

    def vertex(self, label) -> int:
        """Vertex id from a name (or an id, passed through)."""
        if isinstance(label, int):
            return label
        if self.names is None:
            return int(label)
        return self.names.index(label)

    def to_dict(self) -> dict:
        d = {
            "objectives": self.n_obj,
            "scale": self.scale,
            "vertices": list(self.names) if self.names else list(range(self.vertex_count)),
            "edges": [[self.name(u) if self.names else u, self.name(v) if self.names else v,
                       list(c)] for u, v, c in self.edges()],
        }
        if self.coords is not None:
            d["coords"] = [list(xy) for xy in self.coords]
        if self.meta:
            d["meta"] = self.meta
        return d


@dataclass(frozen=True)
class Agent:
    id: int
    start: int
    goal: int


@dataclass(frozen=True)
class Instance:
    graph: Graph
    agents: Tuple[Agent, ...]

    def __post_init__(self):
        n = self.graph.vertex_count
        for a in self.agents:
            if not (0 <= a.start < n and 0 <= a.goal < n):
                raise ContractError("agent %d has an invalid start or goal" % a.id)
        if len({a.start for a in self.agents}) != len(self.agents):
            raise ContractError("agent starts must be pairwise distinct")
        if len({a.goal for a in self.agents}) != len(self.agents):
            raise ContractError("agent goals must be pairwise distinct")
        if [a.id for a in self.agents] != list(range(len(self.agents))):
            raise ContractError("agent ids must be 0..m-1 in order")

    @property
    def m(self) -> int:
        return len(self.agents)

    @property
    def n_obj(self) -> int:
        return self.graph.n_obj

    def to_dict(self) -> dict:
        d = self.graph.to_dict()
        g = self.graph
        d["agents"] = [
            {"start": g.names[a.start] if g.names else a.start,
             "goal": g.names[a.goal] if g.names else a.goal}
            for a in self.agents
        ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def make_instance(graph: Graph, pairs: Sequence[Tuple[int, int]]) -> Instance:
    return Instance(graph, tuple(Agent(i, s, g) for i, (s, g) in enumerate(pairs)))


# ---------------------------------------------------------------------------
# JSON edge-list instances

def instance_from_dict(d: dict) -> Instance:
    """Build an instance from the JSON edge-list format.

    Vertices may be names or integers; edges are ``[from, to, cost]`` with
    integer fixed-point costs. Self-loops must be listed explicitly.
    """
    try:
        verts = list(d["vertices"])
        n_obj = int(d["objectives"])
        scale = int(d.get("scale", 1))
        named = any(isinstance(v, str) for v in verts)
        index = {v: i for i, v in enumerate(verts)}
        adj = [[] for _ in verts]
        for u, v, c in d["edges"]:
            adj[index[u]].append((index[v], tuple(int(x) for x in c)))
        coords = tuple(tuple(xy) for xy in d["coords"]) if "coords" in d else None
        graph = Graph(tuple(tuple(e) for e in adj), n_obj, scale,
                      names=tuple(verts) if named else None, coords=coords,
                      meta=dict(d.get("meta", {})))
        pairs = [(index[a["start"]], index[a["goal"]]) for a in d["agents"]]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ParseError("malformed instance: %r" % (exc,)) from exc
    return make_instance(graph, pairs)


def load_instance_json(text) -> Instance:
    if isinstance(text, bytes):
        text = text.decode()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc.msg, exc.lineno) from None
    return instance_from_dict(d)


def fig1_instance() -> Instance:
    """The two-agent worked example (scale 2, so 0.5 is stored as 1)."""
    from importlib import resources
    text = resources.files("momapf").joinpath("data/fig1.json").read_text()
    return load_instance_json(text)


# ---------------------------------------------------------------------------
# MovingAI maps and scenarios

@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    passable: np.ndarray  # bool, shape (height, width), indexed [y, x]
    heights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.passable.shape != (self.height, self.width):
            raise ContractError("passability array does not match dimensions")
        if not self.passable.any():
            raise ContractError("map has no passable cell")

    def is_free(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.passable[y, x])

    def with_heights(self, heights) -> "GridMap":
        heights = np.asarray(heights, dtype=np.int64)
        if heights.shape != (self.height, self.width):
            raise ContractError("height map does not match dimensions")
        return GridMap(self.width, self.height, self.passable, heights)


def _text_lines(text) -> List[str]:
    if isinstance(text, bytes):
        text = text.decode()
    return text.splitlines()


def load_map(text) -> GridMap:
    lines = _text_lines(text)
    header = {}
    i = 0
    while True:
        if i >= len(lines):
            raise ParseError("missing 'map' line", i + 1)
        parts = lines[i].split()
        i += 1
        if not parts:
            continue
        key = parts[0].lower()
        if key == "map":
            break
        if key not in ("type", "height", "width") or len(parts) != 2:
            raise ParseError("bad header line %r" % lines[i - 1], i)
        header[key] = parts[1]
    for key in ("height", "width"):
        if key not in header:
            raise ParseError("header lacks %r" % key, i)
    try:
        h, w = int(header["height"]), int(header["width"])
    except ValueError:
        raise ParseError("non-integer map dimensions", i) from None
    if h <= 0 or w <= 0:
        raise ParseError("map dimensions must be positive", i)
    rows = lines[i:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != h:
        raise ParseError("expected %d map rows, found %d" % (h, len(rows)), i + len(rows))
    passable = np.zeros((h, w), dtype=bool)
    for y, row in enumerate(rows):
        lineno = i + y + 1
        row = row.rstrip("\r")
        if len(row) != w:
            raise ParseError("row has %d cells, expected %d" % (len(row), w), lineno)
        for x, ch in enumerate(row):
            if ch in PASSABLE:
                passable[y, x] = True
            elif ch not in BLOCKED:
                raise ParseError("unknown cell character %r" % ch, lineno)
    try:
        return GridMap(w, h, passable)
    except ContractError as exc:
        raise ParseError(str(exc)) from None


def dump_map(grid: GridMap) -> str:
    rows = ["".join("." if c else "@" for c in row) for row in grid.passable]
    return "type octile\nheight %d\nwidth %d\nmap\n%s\n" % (grid.height, grid.width, "\n".join(rows))


def load_scenario(text, count: int, grid: Optional[GridMap] = None):
    """First `count` ``((sx, sy), (gx, gy))`` pairs of a ``.scen`` file."""
    lines = _text_lines(text)
    if count < 0:
        raise ContractError("count must be non-negative")
    if not lines or not lines[0].lower().startswith("version"):
        raise ParseError("missing 'version' header", 1)
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if len(pairs) == count:
            break
        if not line.strip():
            continue
        fields = line.rstrip("\r\n").split("\t")
        if len(fields) != 9:
            fields = line.split()
        if len(fields) != 9:
            raise ParseError("expected 9 fields, found %d" % len(fields), lineno)
        try:
            w, h, sx, sy, gx, gy = (int(f) for f in fields[2:8])
            float(fields[8])
        except ValueError:
            raise ParseError("non-numeric field", lineno) from None
        if grid is not None:
            w, h = grid.width, grid.height
        for x, y in ((sx, sy), (gx, gy)):
            if not (0 <= x < w and 0 <= y < h):
                raise ParseError("cell (%d, %d) outside the %dx%d map" % (x, y, w, h), lineno)
            if grid is not None and not grid.passable[y, x]:
                raise ParseError("cell (%d, %d) is blocked" % (x, y), lineno)
        pairs.append(((sx, sy), (gx, gy)))
    if len(pairs) < count:
        raise ContractError("scenario has %d rows, %d requested" % (len(pairs), count))
    return pairs


def dump_scenario(map_name: str, grid: GridMap, pairs) -> str:
    out = ["version 1"]
    for (sx, sy), (gx, gy) in pairs:
        dist = abs(sx - gx) + abs(sy - gy)
        out.append("\t".join(str(f) for f in (0, map_name, grid.width, grid.height,
                                               sx, sy, gx, gy, "%.8f" % dist)))
    return "\n".join(out) + "\n"


def random_scenario(grid: GridMap, count: int, seed: int):
    """Distinct random starts and distinct random goals on free cells."""
    free = [(int(x), int(y)) for y, x in zip(*np.nonzero(grid.passable))]
    if count > len(free):
        raise ContractError("not enough free cells")
    rng = np.random.Generator(np.random.PCG64(seed))
    starts = rng.permutation(len(free))[:count]
    goals = rng.permutation(len(free))[:count]
    return [(free[s], free[g]) for s, g in zip(starts, goals)]


# ---------------------------------------------------------------------------
# objective generators

@dataclass(frozen=True)
class ObjectiveConfig:
    """How edge costs are assigned when building a graph from a grid.

    ``kind`` is one of ``random-bi``, ``random-tri``, ``time-energy`` or
    ``flowtime-augmented`` (which builds ``base_kind`` and inserts an
    all-ones component at ``flowtime_position``). Random kinds draw each
    component from {1, 2} with a PCG64 generator seeded by ``seed``.
    ``wait_cost`` overrides the sampled self-loop cost when given.
    """

    kind: str = "random-bi"
    seed: int = 0
    max_height: int = 8
    wait_cost: Optional[Tuple[int, ...]] = None
    base_kind: Optional[str] = None
    flowtime_position: int = 0

    @property
    def n_obj(self) -> int:
        if self.kind == "flowtime-augmented":
            return OBJECTIVE_COUNTS[self.base_kind] + 1
        return OBJECTIVE_COUNTS[self.kind]


def make_height_map(grid: GridMap, max_height: int) -> np.ndarray:
    """Hill peaked at the map center with linear falloff to 0 at the corners."""
    if max_height < 0:
        raise ContractError("max_height must be non-negative")
    cy, cx = (grid.height - 1) / 2.0, (grid.width - 1) / 2.0
    ys, xs = np.mgrid[0:grid.height, 0:grid.width]
    d = np.hypot(ys - cy, xs - cx)
    d_max = math.hypot(cy, cx)
    if d_max == 0:
        return np.full((grid.height, grid.width), max_height, dtype=np.int64)
    # round half up, not to even
    return np.floor(max_height * (1.0 - d / d_max) + 0.5).astype(np.int64)


def _grid_topology(grid: GridMap):
    cells = [(int(x), int(y)) for y, x in zip(*np.nonzero(grid.passable))]
    index = {c: i for i, c in enumerate(cells)}
    moves = []
    for u, (x, y) in enumerate(cells):
        out = [index[(x + dx, y + dy)] for _, dx, dy in DIRECTIONS
               if grid.is_free(x + dx, y + dy)]
        out.append(u)
        moves.append(out)
    return cells, moves


def build_graph(grid: GridMap, cfg: ObjectiveConfig) -> Graph:
    """4-connected grid graph with one self-loop per cell.

    Random costs are drawn in row-major source order, then N, S, W, E,
    wait, then component index.
    """
    if cfg.kind == "flowtime-augmented":
        if cfg.base_kind not in OBJECTIVE_COUNTS:
            raise ConfigError("flowtime-augmented needs a valid base_kind")
        base = build_graph(grid, ObjectiveConfig(cfg.base_kind, cfg.seed, cfg.max_height,
                                                 cfg.wait_cost))
        g = augment_flowtime(base, cfg.flowtime_position)
        meta = dict(g.meta, kind=cfg.kind, base_kind=cfg.base_kind)
        return Graph(g.adj, g.n_obj, g.scale, g.names, g.coords, meta)
    if cfg.kind not in OBJECTIVE_COUNTS:
        raise ConfigError("unknown objective kind %r" % cfg.kind)
    n_obj = OBJECTIVE_COUNTS[cfg.kind]
    if cfg.wait_cost is not None and len(cfg.wait_cost) != n_obj:
        raise ConfigError("wait_cost must have %d components" % n_obj)
    cells, moves = _grid_topology(grid)
    n_edges = sum(len(out) for out in moves)
    adj = []
    if cfg.kind in ("random-bi", "random-tri"):
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        draws = rng.integers(1, 3, size=(n_edges, n_obj))
        k = 0
        for u, out in enumerate(moves):
            row = []
            for v in out:
                c = tuple(int(x) for x in draws[k])
                k += 1
                if v == u and cfg.wait_cost is not None:
                    c = tuple(cfg.wait_cost)
                row.append((v, c))
            adj.append(tuple(row))
    else:
        if grid.heights is None:
            raise ConfigError("time-energy objectives need a height map")
        hgt = grid.heights
        for u, out in enumerate(moves):
            hu = int(hgt[cells[u][1], cells[u][0]])
            row = []
            for v in out:
                hv = int(hgt[cells[v][1], cells[v][0]])
                c = (1, hv - hu if hv > hu else 1)
                if v == u and cfg.wait_cost is not None:
                    c = tuple(cfg.wait_cost)
                row.append((v, c))
            adj.append(tuple(row))
    meta = {"kind": cfg.kind, "seed": cfg.seed,
            "wait_cost": "sampled" if cfg.wait_cost is None else list(cfg.wait_cost)}
    if cfg.kind == "time-energy":
        meta["wait_cost"] = [1, 1] if cfg.wait_cost is None else list(cfg.wait_cost)
    return Graph(tuple(adj), n_obj, 1, coords=tuple(cells), meta=meta)


def augment_flowtime(graph: Graph, position: int) -> Graph:
    """Insert an objective worth one (real) unit on every edge."""
    if not 0 <= position <= graph.n_obj:
        raise ContractError("position %d outside 0..%d" % (position, graph.n_obj))
    one = graph.scale

    def ins(c):
        return c[:position] + (one,) + c[position:]

    adj = tuple(tuple((v, ins(c)) for v, c in out) for out in graph.adj)
    return Graph(adj, graph.n_obj + 1, graph.scale, graph.names, graph.coords, dict(graph.meta))


def grid_instance(grid: GridMap, pairs, cfg: ObjectiveConfig) -> Instance:
    """Instance over ``build_graph(grid, cfg)`` with cell-coordinate agents."""
    if cfg.kind == "time-energy" or cfg.base_kind == "time-energy":
        if grid.heights is None:
            grid = grid.with_heights(make_height_map(grid, cfg.max_height))
    graph = build_graph(grid, cfg)
    index = {c: i for i, c in enumerate(graph.coords)}
    try:
        vpairs = [(index[tuple(s)], index[tuple(g)]) for s, g in pairs]
    except KeyError as exc:
        raise ContractError("agent cell %r is not passable" % (exc.args[0],)) from None
    return make_instance(graph, vpairs)


def _connected(passable: np.ndarray) -> bool:
    free = list(zip(*np.nonzero(passable)))
    if not free:
        return False
    seen = {free[0]}
    stack = [free[0]]
    h, w = passable.shape
    while stack:
        y, x = stack.pop()
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and passable[ny, nx] and (ny, nx) not in seen:
                seen.add((ny, nx))
                stack.append((ny, nx))
    return len(seen) == len(free)


def random_small_instance(seed: int, width: int = 4, height: int = 4, free_range=(10, 14),
                          agents_range=(2, 3), kind: str = "random-bi") -> Instance:
    """Seeded random connected grid with random agents, for oracle checks.

    Free-cell count and agent count are drawn uniformly from the inclusive
    ranges; obstacle layouts are redrawn until the free cells are connected.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n_free = int(rng.integers(free_range[0], free_range[1] + 1))
    m = int(rng.integers(agents_range[0], agents_range[1] + 1))
    while True:
        order = rng.permutation(width * height)
        passable = np.zeros(width * height, dtype=bool)
        passable[order[:n_free]] = True
        passable = passable.reshape(height, width)
        if _connected(passable):
            break
    grid = GridMap(width, height, passable)
    pairs = random_scenario(grid, m, int(rng.integers(0, 2**63)))
    return grid_instance(grid, pairs, ObjectiveConfig(kind, int(rng.integers(0, 2**63))))
