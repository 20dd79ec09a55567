"""Benchmark runner and command-line entry point.

    python3 -m momapf.bench run --map empty-16-16 --scen empty-16-16-random-1 --agents 3
    python3 -m momapf.bench run --instance fig1
    python3 -m momapf.bench suite --map empty-16-16 --scen-count 10 --agents 2-6

Each run appends one JSON line to ``records.jsonl``; a suite also writes
``aggregate.csv``. Files go to ``--out-dir``, else ``$MOMAPF_OUTPUT_DIR``,
else ``./results``. Exit status is 0 on success (timeouts included), 1 on
usage or configuration errors and 2 on unparsable input files.
"""
import argparse
import csv
from dataclasses import asdict, dataclass
from importlib import resources
import io
import json
import os
from pathlib import Path as FsPath
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from .highlevel import COMPLETE, STRATEGIES, solve
from .instance import (ConfigError, Instance, ObjectiveConfig, ParseError, grid_instance,
                       load_instance_json, load_map, load_scenario)
from .pareto import ContractError

OUTPUT_ENV = "MOMAPF_OUTPUT_DIR"
BUILTIN_MAPS = ("empty-16-16",)


@dataclass(frozen=True)
class RunConfig:
    map: Optional[str] = None
    scen: Optional[str] = None
    agents: int = 2
    objective: str = "random-bi"
    seed: int = 0
    strategy: str = "disjoint"
    time_limit: float = 60.0
    heuristic: bool = True
    cache: bool = True
    instance: Optional[str] = None   # JSON instance path, or "fig1"
    out_dir: Optional[str] = None

    def validate(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError("unknown strategy %r" % self.strategy)
        if not self.time_limit > 0:
            raise ConfigError("time limit must be positive")
        if self.instance is None and (self.map is None or self.scen is None):
            raise ConfigError("need --instance or both --map and --scen")
        if self.agents < 1:
            raise ConfigError("agent count must be at least 1")

    def key(self) -> Tuple:
        return (self.instance or "", self.map or "", self.scen or "", self.objective,
                self.agents, self.seed, STRATEGIES.index(self.strategy))

    def instance_key(self) -> Tuple:
        """Identifies the problem instance independently of the strategy."""
        return self.key()[:-1]


@dataclass
class RunRecord:
    config: RunConfig
    status: str
    costs: List[Tuple[int, ...]]
    stats: Dict
    wall_time: float
    scale: int = 1
    unsolvable: bool = False
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.status == COMPLETE and self.error is None

    def to_dict(self, timing: bool = True) -> dict:
        cfg = asdict(self.config)
        cfg.pop("out_dir")
        stats = dict(self.stats)
        d = {"config": cfg, "status": self.status, "unsolvable": self.unsolvable,
             "scale": self.scale, "costs": [list(c) for c in self.costs], "stats": stats}
        if self.error is not None:
            d["error"] = self.error
        if timing:
            d["wall_time"] = self.wall_time
        else:
            stats.pop("wall_time", None)
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(RunConfig(**d["config"]), d["status"], [tuple(c) for c in d["costs"]],
                   d["stats"], d.get("wall_time", 0.0), d.get("scale", 1),
                   d.get("unsolvable", False), d.get("error"))


# ---------------------------------------------------------------------------
# inputs

def _read_text(name: str, suffix: str) -> str:
    """File contents; bare names fall back to the bundled data directory."""
    p = FsPath(name)
    if p.exists():
        return p.read_text()
    data = resources.files("momapf") / "data"
    for cand in (name, name + suffix):
        f = data / cand
        if f.is_file():
            return f.read_text()
    raise FileNotFoundError(name)


def build_instance(cfg: RunConfig) -> Instance:
    if cfg.instance is not None:
        if cfg.instance == "fig1":
            from .instance import fig1_instance
            return fig1_instance()
        return load_instance_json(_read_text(cfg.instance, ".json"))
    grid = load_map(_read_text(cfg.map, ".map"))
    pairs = load_scenario(_read_text(cfg.scen, ".scen"), cfg.agents, grid)
    if cfg.objective == "flowtime-augmented":
        ocfg = ObjectiveConfig("flowtime-augmented", cfg.seed, base_kind="random-bi")
    else:
        ocfg = ObjectiveConfig(cfg.objective, cfg.seed)
    return grid_instance(grid, pairs, ocfg)


def builtin_scenarios(map_name: str = "empty-16-16", count: int = 10) -> List[str]:
    return ["%s-random-%d" % (map_name, k) for k in range(1, count + 1)]


# ---------------------------------------------------------------------------
# running

def run_one(cfg: RunConfig, instance: Optional[Instance] = None) -> RunRecord:
    """Build the instance and solve it. Parse and config errors propagate."""
    cfg.validate()
    inst = instance if instance is not None else build_instance(cfg)
    res = solve(inst, cfg.strategy, time_limit=cfg.time_limit,
                use_heuristic=cfg.heuristic, use_cache=cfg.cache)
    return RunRecord(cfg, res.status, sorted(res.costs), res.stats.as_dict(),
                     res.stats.wall_time, inst.graph.scale, res.unsolvable)


def run_suite(configs: Sequence[RunConfig], sink=None) -> List[RunRecord]:
    """Run every config in key order. Failures are recorded and the suite continues."""
    records = []
    built: Dict[Tuple, Instance] = {}
    for cfg in sorted(configs, key=RunConfig.key):
        try:
            ik = cfg.instance_key()
            if ik not in built:
                built = {ik: build_instance(cfg)}   # configs sharing an instance are adjacent
            rec = run_one(cfg, built[ik])
        except (ParseError, ConfigError, ContractError, OSError) as exc:
            rec = RunRecord(cfg, "error", [], {}, 0.0, error="%s: %s" % (type(exc).__name__, exc))
        records.append(rec)
        if sink is not None:
            sink(rec)
    return records


AGGREGATE_FIELDS = ("map", "objective", "agents", "strategy", "runs", "solved", "success_rate",
                    "common", "mean_runtime", "mean_expansions", "mean_generations",
                    "branching_factor")


def aggregate(records: Sequence[RunRecord]) -> List[dict]:
    """One row per (map, objective, agents, strategy).

    Runtime, expansion and branching-factor means are taken over instances
    solved by every strategy present for that group; the branching factor is
    children per split event pooled across those runs.
    """
    groups: Dict[Tuple, List[RunRecord]] = {}
    for r in records:
        c = r.config
        groups.setdefault((c.instance or c.map or "", c.objective, c.agents), []).append(r)
    rows = []
    for (mp, obj, m), recs in sorted(groups.items()):
        strategies = sorted({r.config.strategy for r in recs}, key=STRATEGIES.index)
        solved_by: Dict[Tuple, set] = {}
        for r in recs:
            if r.solved:
                solved_by.setdefault(r.config.instance_key(), set()).add(r.config.strategy)
        common = {k for k, s in solved_by.items() if len(s) == len(strategies)}
        for st in strategies:
            mine = [r for r in recs if r.config.strategy == st]
            com = [r for r in mine if r.solved and r.config.instance_key() in common]
            events = [k for r in com for k in r.stats.get("split_children", [])]
            n = len(com)
            rows.append({
                "map": mp, "objective": obj, "agents": m, "strategy": st,
                "runs": len(mine), "solved": sum(r.solved for r in mine),
                "success_rate": sum(r.solved for r in mine) / len(mine),
                "common": n,
                "mean_runtime": sum(r.wall_time for r in com) / n if n else None,
                "mean_expansions": sum(r.stats["expansions"] for r in com) / n if n else None,
                "mean_generations": sum(r.stats["generations"] for r in com) / n if n else None,
                "branching_factor": sum(events) / len(events) if events else None,
            })
    return rows


def aggregate_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=AGGREGATE_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def load_records(path) -> List[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# command line

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _int_range(text: str) -> List[int]:
    out = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi or lo) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError("expected N, N-M or a comma list, got %r" % text)
    return out


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="momapf.bench", description="Run MO-CBS on MovingAI or JSON instances.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--map", help="MovingAI .map file or bundled map name")
        sp.add_argument("--objective", default="random-bi",
                        choices=("random-bi", "random-tri", "time-energy", "flowtime-augmented"))
        sp.add_argument("--seed", type=int, default=0, help="edge-cost generator seed")
        sp.add_argument("--time-limit", type=float, default=60.0)
        sp.add_argument("--no-heuristic", action="store_true")
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--out-dir", help="output directory (default $%s or ./results)" % OUTPUT_ENV)

    run = sub.add_parser("run", help="solve one instance")
    common(run)
    run.add_argument("--scen", help="MovingAI .scen file or bundled scenario name")
    run.add_argument("--agents", type=int, default=2)
    run.add_argument("--strategy", default="disjoint", choices=STRATEGIES)
    run.add_argument("--instance", help="JSON instance file, or 'fig1'")

    suite = sub.add_parser("suite", help="grid over scenarios, agent counts and strategies")
    common(suite)
    suite.add_argument("--scen", nargs="+", help="scenario files (default: bundled ones)")
    suite.add_argument("--scen-count", type=int, default=10,
                       help="number of bundled scenarios when --scen is absent")
    suite.add_argument("--agents", type=_int_range, default=[2, 3, 4])
    suite.add_argument("--strategies", nargs="+", default=list(STRATEGIES), choices=STRATEGIES)
    return p


def _out_dir(args) -> FsPath:
    return FsPath(args.out_dir or os.environ.get(OUTPUT_ENV) or "results")


def _configs(args) -> List[RunConfig]:
    base = dict(objective=args.objective, seed=args.seed, time_limit=args.time_limit,
                heuristic=not args.no_heuristic, cache=not args.no_cache)
    if args.command == "run":
        return [RunConfig(map=args.map, scen=args.scen, agents=args.agents,
                          strategy=args.strategy, instance=args.instance, **base)]
    mp = args.map or "empty-16-16"
    scens = args.scen or builtin_scenarios(FsPath(mp).stem, args.scen_count)
    return [RunConfig(map=mp, scen=s, agents=m, strategy=st, **base)
            for s in scens for m in args.agents for st in args.strategies]


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    configs = _configs(args)
    out = _out_dir(args)
    try:
        for c in configs:
            c.validate()
        if args.command == "run":
            records = [run_one(configs[0])]
        else:
            # surface unreadable inputs before spending time on the suite
            for key in {(c.map, c.scen) for c in configs}:
                build_instance(RunConfig(map=key[0], scen=key[1], agents=max(args.agents)))
            records = run_suite(configs)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except (ConfigError, ContractError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.jsonl", "a") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")
    if args.command == "suite":
        (out / "aggregate.csv").write_text(aggregate_csv(aggregate(records)))
    for r in records:
        c = r.config
        label = c.instance or "%s/%s" % (FsPath(c.map).stem, FsPath(c.scen).stem)
        costs = " ".join("(" + ",".join(_fmt(x, r.scale) for x in v) + ")" for v in r.costs)
        print("%-36s m=%d %-8s %-15s %7.3fs  %s" % (label, c.agents, c.strategy, r.status,
                                                  r.wall_time, costs))
    return 0


def _fmt(x: int, scale: int) -> str:
    return str(x // scale) if x % scale == 0 else repr(x / scale)


if __name__ == "__main__":
    sys.exit(main())
