"""The two-agent example, strategy by strategy.

Agent 1 goes A -> D and agent 2 goes E -> A on a six-vertex graph with two
objectives. Each agent alone has two Pareto-optimal paths, so the search
starts from two roots. This script prints the event trace of each strategy
to show how many children each split creates.
"""
from momapf import fig1_instance, solve
from momapf.highlevel import STRATEGIES, TraceLog

inst = fig1_instance()
g = inst.graph


def real(cost):
    return "(" + ", ".join("%g" % (c / g.scale) for c in cost) + ")"


print("Vertices:", ", ".join(g.names))
for a in inst.agents:
    print("agent %d: %s -> %s" % (a.id + 1, g.names[a.start], g.names[a.goal]))

for st in STRATEGIES:
    print("\n== %s ==" % st)
    log = TraceLog()
    res = solve(inst, st, trace=log)
    for e in log.events:
        node = e.get("node")
        if e["event"] == "pop":
            print("pop   node %-3d cost %s" % (node.seq, real(node.cost)))
        elif e["event"] == "prune":
            print("prune node %-3d at %s" % (node.seq, e["where"]))
        elif e["event"] == "split":
            c = e["conflict"]
            what = "vertex %s" % g.names[c.v] if c.kind == 0 else \
                "edge %s-%s" % (g.names[c.u], g.names[c.v])
            kids = [k.seq for _, _, _, ks in e["sides"] for k in ks]
            print("split node %-3d on %s at t=%d -> children %s" % (node.seq, what, c.t, kids))
        elif e["event"] == "solution":
            print("solution at node %d, cost %s" % (node.seq, real(node.cost)))
    s = res.stats
    print("expansions %d, children per split %s" % (s.expansions, s.split_children))

# every strategy returns the same frontier
print("\nFrontier:")
for sol in solve(inst, "disjoint").solutions:
    print(" ", real(sol.cost), [" ".join(p.names(g)) for p in sol.paths])
