import json

import numpy as np
import pytest

from momapf.instance import (ConfigError, ObjectiveConfig, ParseError, augment_flowtime,
                             build_graph, dump_map, fig1_instance, grid_instance,
                             instance_from_dict, load_instance_json, load_map, load_scenario,
                             make_height_map, make_instance, random_scenario,
                             random_small_instance)
from momapf.pareto import ContractError

MAP_2x2 = "type octile\nheight 2\nwidth 2\nmap\n..\n..\n"


def grid(rows):
    return load_map("type octile\nheight %d\nwidth %d\nmap\n%s\n"
                    % (len(rows), len(rows[0]), "\n".join(rows)))


def test_load_map_basic():
    g = load_map(MAP_2x2)
    assert (g.width, g.height) == (2, 2)
    assert g.passable.all()


def test_load_map_blocked_cell():
    g = grid([".@", "G."])
    assert not g.is_free(1, 0)
    assert g.is_free(0, 1) and g.is_free(0, 0) and g.is_free(1, 1)


def test_load_map_accepts_bytes():
    assert load_map(MAP_2x2.encode()).passable.sum() == 4


@pytest.mark.parametrize("text,line", [
    ("type octile\nheight 16\nwidth 2\nmap\n" + "..\n" * 15, None),
    ("type octile\nheight 2\nwidth 2\nmap\n..\n.\n", 6),
    ("type octile\nheight 2\nwidth 2\nmap\n..\n.x\n", 6),
    ("type octile\nheigth 2\nwidth 2\nmap\n..\n..\n", 2),
])
def test_load_map_errors(text, line):
    with pytest.raises(ParseError) as exc:
        load_map(text)
    if line is not None:
        assert exc.value.lineno == line


def test_map_round_trip():
    g = grid(["..@", "T..", "..."])
    assert np.array_equal(load_map(dump_map(g)).passable, g.passable)


def scen(rows):
    lines = ["version 1"]
    for k, (sx, sy, gx, gy) in enumerate(rows):
        lines.append("0\tm.map\t4\t4\t%d\t%d\t%d\t%d\t%d" % (sx, sy, gx, gy, k))
    return "\n".join(lines) + "\n"


def test_load_scenario_prefix():
    rows = [(k % 4, k // 4, 3 - k % 4, 3 - k // 4) for k in range(10)]
    assert load_scenario(scen(rows), 4) == [((x, y), (a, b)) for x, y, a, b in rows[:4]]
    assert load_scenario(scen(rows), 0) == []


def test_load_scenario_errors():
    rows = [(0, 0, 1, 1)]
    with pytest.raises(ContractError):
        load_scenario(scen(rows), 2)
    bad = scen(rows).replace("\t1\t1\t0", "\tx\t1\t0")
    with pytest.raises(ParseError):
        load_scenario(bad, 1)
    with pytest.raises(ParseError):
        load_scenario("version 1\n0\tm.map\t4\n", 1)
    with pytest.raises(ParseError):
        load_scenario(scen([(0, 0, 9, 1)]), 1, grid(["....", "....", "....", "...."]))


def test_random_costs_in_range_and_deterministic():
    g = grid([".."])
    gr = build_graph(g, ObjectiveConfig("random-bi", 7))
    assert gr.vertex_count == 2
    edges = list(gr.edges())
    assert len(edges) == 4
    assert sum(1 for u, v, _ in edges if u == v) == 2
    assert all(x in (1, 2) for _, _, c in edges for x in c)
    again = build_graph(g, ObjectiveConfig("random-bi", 7))
    assert json.dumps(gr.to_dict()) == json.dumps(again.to_dict())


def test_random_draw_order():
    g = grid(["..", ".."])
    gr = build_graph(g, ObjectiveConfig("random-tri", 3))
    rng = np.random.Generator(np.random.PCG64(3))
    # row-major sources; N, S, W, E then wait
    expected_targets = [[2, 1, 0], [3, 0, 1], [0, 3, 2], [1, 2, 3]]
    draws = rng.integers(1, 3, size=(12, 3))
    k = 0
    for u in range(4):
        assert [v for v, _ in gr.adj[u]] == expected_targets[u]
        for _, c in gr.adj[u]:
            assert c == tuple(int(x) for x in draws[k])
            k += 1


def test_wait_cost_override_recorded():
    gr = build_graph(grid(["..."]), ObjectiveConfig("random-bi", 1, wait_cost=(1, 1)))
    assert all(c == (1, 1) for u, v, c in gr.edges() if u == v)
    assert gr.meta["wait_cost"] == [1, 1]


def test_time_energy():
    g = grid(["..."])
    flat = build_graph(g.with_heights(np.zeros((1, 3), int)), ObjectiveConfig("time-energy"))
    assert all(c == (1, 1) for _, _, c in flat.edges())
    hill = build_graph(g.with_heights(np.array([[0, 3, 1]])), ObjectiveConfig("time-energy"))
    assert hill.edge_cost(0, 1) == (1, 3)
    assert hill.edge_cost(1, 0) == (1, 1)
    assert hill.edge_cost(1, 2) == (1, 1)
    with pytest.raises(ConfigError):
        build_graph(g, ObjectiveConfig("time-energy"))


def test_height_map():
    g = grid(["...", "...", "..."])
    h = make_height_map(g, 2)
    assert h.tolist() == [[0, 1, 0], [1, 2, 1], [0, 1, 0]]
    big = make_height_map(grid(["." * 16] * 16), 8)
    assert big[0, 0] == 0 and big.max() <= 8


def test_flowtime_augment():
    base = build_graph(grid(["..", "@."]), ObjectiveConfig("random-bi", 2))
    one = augment_flowtime(base, 0)
    assert one.n_obj == 3
    assert all(c[0] == 1 for _, _, c in one.edges())
    two = augment_flowtime(one, 3)
    assert two.n_obj == 4 and all(c[0] == 1 and c[3] == 1 for _, _, c in two.edges())
    assert two.vertex_count == base.vertex_count
    with pytest.raises(ContractError):
        augment_flowtime(base, 3)
    cfg = ObjectiveConfig("flowtime-augmented", 2, base_kind="random-bi")
    assert cfg.n_obj == 3
    assert build_graph(grid(["..", "@."]), cfg).n_obj == 3


def test_fig1_round_trip():
    inst = fig1_instance()
    assert inst.graph.scale == 2 and inst.m == 2
    assert inst.graph.edge_cost(inst.graph.vertex("C"), inst.graph.vertex("D")) == (1, 4)
    again = load_instance_json(inst.to_json())
    assert again.to_dict() == inst.to_dict()


def test_instance_validation():
    gr = build_graph(grid(["..."]), ObjectiveConfig("random-bi", 0))
    with pytest.raises(ContractError):
        make_instance(gr, [(0, 1), (0, 2)])
    with pytest.raises(ContractError):
        make_instance(gr, [(0, 2), (1, 2)])
    d = make_instance(gr, [(0, 2)]).to_dict()
    d["edges"] = [e for e in d["edges"] if e[0] != e[1] or e[0] != 1]
    with pytest.raises((ContractError, ValueError)):
        instance_from_dict(d)


def test_grid_instance_and_random_helpers():
    g = grid(["....", "....", "....", "...."])
    pairs = random_scenario(g, 3, 5)
    assert len({s for s, _ in pairs}) == 3 and len({t for _, t in pairs}) == 3
    inst = grid_instance(g, pairs, ObjectiveConfig("time-energy"))
    assert inst.n_obj == 2
    a = random_small_instance(11)
    b = random_small_instance(11)
    assert a.to_json() == b.to_json()
    assert 10 <= a.graph.vertex_count <= 14 and 2 <= a.m <= 3
