"""Seeded random cases shared by the test modules."""
import numpy as np

from momapf.constraints import Constraint, ConstraintSet
from momapf.instance import random_small_instance
from momapf.oracle import single_agent_frontier


def lowlevel_case(seed):
    """A single-agent instance and a random constraint set for it."""
    kind = "random-bi" if seed % 3 else "random-tri"
    inst = random_small_instance(10_000 + seed, agents_range=(1, 1), kind=kind)
    g = inst.graph
    rng = np.random.Generator(np.random.PCG64(seed))
    cons = []
    for _ in range(int(rng.integers(0, 7))):
        t = int(rng.integers(0, 7))
        u = int(rng.integers(g.vertex_count))
        if rng.random() < 0.5:
            cons.append(Constraint.vertex(0, u, t + 1))
        else:
            v, _ = g.adj[u][int(rng.integers(len(g.adj[u])))]
            cons.append(Constraint.edge(0, u, v, t))
    return inst, ConstraintSet.of(cons)


def reference_frontier(graph, agent, cset, horizon=12, step=4, cap=40):
    """Depth-bounded enumeration, deepened until two horizons agree."""
    cur = single_agent_frontier(graph, agent, cset, horizon)
    while horizon < cap:
        nxt = single_agent_frontier(graph, agent, cset, horizon + step)
        if nxt == cur:
            return cur, horizon
        cur, horizon = nxt, horizon + step
    raise AssertionError("enumeration did not settle by horizon %d" % cap)
