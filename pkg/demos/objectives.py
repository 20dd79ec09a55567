"""What the objective generators put on the edges of a grid.

The map is a small grid with one wall. Each generator turns it into a graph
with a cost vector on every move and wait. The costs for one cell are
printed, and then the same two agents are solved under each objective.
"""
from momapf import solve
from momapf.instance import ObjectiveConfig, grid_instance, load_map, make_height_map

MAP = """type octile
height 5
width 6
map
......
......
..@@..
......
......
"""
grid = load_map(MAP)
pairs = [((0, 0), (5, 4)), ((5, 0), (0, 4))]    # (x, y) start and goal


def show(cfg, label):
    inst = grid_instance(grid, pairs, cfg)
    g = inst.graph
    v = inst.agents[0].start
    print("\n-- %s (%d objectives) --" % (label, g.n_obj))
    for w, c in g.adj[v]:
        print("  %s -> %-8s %s" % (g.coords[v], g.coords[w], c))
    res = solve(inst, "disjoint", time_limit=30)
    print("  %s, %d Pareto-optimal joint plans:" % (res.status, len(res.solutions)))
    for sol in res.solutions:
        print("    cost", sol.cost)


show(ObjectiveConfig("random-bi", seed=3), "two random objectives in {1, 2}")
show(ObjectiveConfig("random-tri", seed=3), "three random objectives")

print("\nHeight map used by time-energy (peak in the middle):")
print(make_height_map(grid, 8))
show(ObjectiveConfig("time-energy"), "time and energy")

show(ObjectiveConfig("flowtime-augmented", seed=3, base_kind="random-bi"),
     "random-bi with a flowtime component in front")
