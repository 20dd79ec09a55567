import pytest

from momapf.constraints import Constraint
from momapf.highlevel import (COMPLETE, EXPANSION_LIMIT, SPLITTERS, STRATEGIES, TIMEOUT, TraceLog,
                              as_mode, detect_first_conflict, dominated_by_solutions, init_roots,
                              occupancy, solve, split_cost, split_disjoint, split_standard)
from momapf.instance import fig1_instance, make_instance
from momapf.lowlevel import LowLevel, make_path, pareto_paths
from momapf.oracle import solvable_random_instances
from momapf.pareto import is_nd_set

FRONTIER = [(13, 14), (16, 12)]   # (6.5, 7) and (8, 6) at scale 2


@pytest.fixture(scope="module")
def fig1():
    return fig1_instance()


@pytest.fixture(scope="module")
def suite():
    return solvable_random_instances(25)


def roots(inst, mode):
    low = LowLevel(inst)
    rs, unsolvable = init_roots(inst, low, mode)
    assert not unsolvable
    return rs, low


def test_occupancy(fig1):
    p = make_path(fig1.graph, "ACD")
    assert fig1.graph.name(occupancy(p, 2)) == "D"
    assert occupancy(p, 0) == p.start
    assert occupancy(p, 10 ** 6) == p.goal


def test_first_conflict_fig1(fig1):
    rs, _ = roots(fig1, "standard")
    c = detect_first_conflict(rs[0].paths)
    assert (c.kind, c.i, c.j, fig1.graph.name(c.v), c.t) == (0, 0, 1, "D", 2)


def test_edge_conflict_detected(fig1):
    g = fig1.graph
    c = detect_first_conflict([make_path(g, "ABD"), make_path(g, "DBA")])
    # they meet at B at t=1 first
    assert (c.kind, c.t) == (0, 1)
    c = detect_first_conflict([make_path(g, "AB"), make_path(g, "BA")])
    assert (c.kind, c.u, c.v, c.t) == (1, g.vertex("A"), g.vertex("B"), 0)
    assert c.constraints() == [(0, Constraint.edge(0, c.u, c.v, 0)),
                               (1, Constraint.edge(1, c.v, c.u, 0))]


def test_no_conflict_in_solution(fig1):
    g = fig1.graph
    assert detect_first_conflict([make_path(g, "ACCD"), make_path(g, "EFDBA")]) is None


def test_terminated_agent_blocks_goal(fig1):
    g = fig1.graph
    c = detect_first_conflict([make_path(g, "AC"), make_path(g, "EFDCA")])
    assert (c.kind, g.name(c.v), c.t) == (0, "C", 3)


def test_roots(fig1):
    rs, _ = roots(fig1, "cost")
    assert [r.lb for r in rs] == [((3, 6), (8, 8)), ((6, 4), (8, 8))]
    assert all(r.ub is None for r in rs)
    rs, _ = roots(fig1, "disjoint")
    assert [r.ub[0] for r in rs] == [(), ((6, 6),)]
    assert all(r.ub[1] == () for r in rs)
    rs, _ = roots(fig1, "standard")
    assert len(rs) == 2 and rs[0].lb is None


def test_single_path_single_root(fig1):
    inst = make_instance(fig1.graph, [(fig1.agents[1].start, fig1.agents[1].goal)])
    rs, _ = roots(inst, "disjoint")
    assert len(rs) == 1


def test_unsolvable_root(fig1):
    # E's only neighbour is F; a goal on an isolated start is reachable, so block via a one-way graph
    d = fig1.to_dict()
    d["edges"] = [e for e in d["edges"] if not (e[0] == "F" and e[1] == "E")]
    from momapf.instance import instance_from_dict
    inst = instance_from_dict(dict(d, agents=[{"start": "A", "goal": "E"}]))
    res = solve(inst, "disjoint")
    assert res.unsolvable and res.solutions == [] and res.status == COMPLETE


def split_sides(node, fn, low):
    conflict = detect_first_conflict(node.paths)
    sides = []
    fn(node, conflict, low, sides)
    return sides


def test_split_counts_fig1(fig1):
    expected = {"standard": [(2, 1), (2, 1)], "cost": [(1, 1), (2, 1)], "disjoint": [(1, 1), (1, 1)]}
    for mode, fn in SPLITTERS.items():
        rs, low = roots(fig1, mode)
        got = [tuple(len(k) for _, _, _, k in split_sides(r, fn, low)) for r in rs]
        assert got == expected[mode], mode


def test_split_cost_bounds(fig1):
    rs, low = roots(fig1, "cost")
    a1 = split_sides(rs[0], split_cost, low)[0][3]
    assert [(k.lb[0], "".join(k.paths[0].names(fig1.graph))) for k in a1] == [((5, 6), "ACCD")]
    a1 = split_sides(rs[1], split_cost, low)[0][3]
    assert sorted(k.lb[0] for k in a1) == [(6, 6), (8, 4)]


def test_split_disjoint_prunes(fig1):
    rs, low = roots(fig1, "disjoint")
    a1 = split_sides(rs[1], split_disjoint, low)[0][3]
    assert [(k.lb[0], k.ub[0]) for k in a1] == [((8, 4), ((8, 6),))]


def test_disjoint_equals_cost_without_ub(fig1):
    rs, low = roots(fig1, "disjoint")
    node = rs[0]
    c = detect_first_conflict(node.paths)
    d = split_disjoint(node, c, low)
    k = split_cost(as_mode(node, "cost"), c, low)
    assert [(x.lb, x.paths) for x in d] == [(x.lb, x.paths) for x in k]


def test_dominated_by_solutions():
    assert dominated_by_solutions([(13, 14)], (13, 14))
    assert dominated_by_solutions([(13, 14)], (16, 16))
    assert not dominated_by_solutions([], (1, 1))
    assert not dominated_by_solutions([(13, 14)], (16, 12))


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_fig1_frontier(fig1, strategy):
    res = solve(fig1, strategy)
    assert res.status == COMPLETE
    assert sorted(res.costs) == FRONTIER
    for s in res.solutions:
        assert detect_first_conflict(s.paths) is None
        assert s.cost == tuple(map(sum, zip(*(p.cost for p in s.paths))))


def test_fig1_expansion_order(fig1):
    tr = TraceLog(fig1.graph)
    solve(fig1, "standard", trace=tr)
    events = [(e["event"], e["node"].seq, e.get("where")) for e in tr.events
              if e["event"] in ("pop", "solution", "prune")]
    assert events[:8] == [
        ("pop", 0, None),
        ("pop", 2, None), ("solution", 2, None),
        ("pop", 4, None), ("prune", 4, "pop"),
        ("pop", 1, None), ("prune", 5, "add"),
        ("pop", 3, None),
    ]


def test_stats_invariant(fig1):
    for st in STRATEGIES:
        s = solve(fig1, st).stats
        assert s.generations == s.roots + sum(s.split_children)
        assert s.expansions == len(s.split_children)


def test_single_agent(fig1):
    inst = make_instance(fig1.graph, [(fig1.agents[0].start, fig1.agents[0].goal)])
    res = solve(inst, "standard")
    assert sorted(res.costs) == [p.cost for p in pareto_paths(inst.graph, inst.agents[0])]
    assert res.stats.expansions == 0


def test_limits(fig1):
    assert solve(fig1, "standard", max_expansions=0).status == EXPANSION_LIMIT
    assert solve(fig1, "standard", time_limit=1e-9).status == TIMEOUT
    with pytest.raises(ValueError):
        solve(fig1, "nope")


def test_trace_jsonl(fig1):
    tr = TraceLog(fig1.graph)
    solve(fig1, "disjoint", trace=tr)
    lines = tr.to_jsonl().splitlines()
    assert len(lines) == len(tr.events)
    import json
    first_split = next(json.loads(l) for l in lines if '"split"' in l)
    assert first_split["conflict"]["kind"] == "vertex"
    assert [s["agent"] for s in first_split["sides"]] == [0, 1]


def test_random_frontiers_agree(suite):
    for seed, inst, ref in suite:
        for st in STRATEGIES:
            res = solve(inst, st, time_limit=60)
            assert res.status == COMPLETE
            assert sorted(res.costs) == sorted(ref.costs), (seed, st)
            assert is_nd_set(res.costs)


def test_split_dominance_on_bounded_nodes(suite):
    # replay nodes popped by the cost and disjoint searches, which carry real bounds
    for _, inst, _ in suite[:15]:
        for mode in ("cost", "disjoint"):
            tr = TraceLog()
            low = LowLevel(inst)
            solve(inst, mode, trace=tr, low=low)
            for e in tr.of("split"):
                node, conflict = e["node"], e["conflict"]
                n_std = len(split_standard(node, conflict, low))
                n_cost = len(split_cost(as_mode(node, "cost"), conflict, low))
                n_dis = len(split_disjoint(as_mode(node, "disjoint"), conflict, low))
                assert n_dis <= n_cost <= n_std
