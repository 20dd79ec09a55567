"""A small benchmark on the bundled empty 16x16 map.

Three scenarios with 4 to 6 agents are run under every split strategy. The
aggregate table has the numbers to compare: cost and disjoint splitting make
fewer children per split than standard splitting.
"""
import sys

from momapf.bench import RunConfig, aggregate, builtin_scenarios, run_suite
from momapf.highlevel import STRATEGIES

configs = [RunConfig(map="empty-16-16", scen=s, agents=m, strategy=st, time_limit=20)
           for s in builtin_scenarios(count=3) for m in (4, 5, 6) for st in STRATEGIES]


def progress(rec):
    sys.stdout.write("." if rec.solved else "x")
    sys.stdout.flush()


records = run_suite(configs, sink=progress)
print()

print("%-6s %-9s %7s %10s %12s %10s" % ("agents", "strategy", "solved", "runtime", "expansions",
                                          "branching"))
for row in aggregate(records):
    def f(x, fmt):
        return "-" if x is None else fmt % x
    print("%-6d %-9s %3d/%-3d %10s %12s %10s" % (
        row["agents"], row["strategy"], row["solved"], row["runs"],
        f(row["mean_runtime"], "%.3fs"), f(row["mean_expansions"], "%.1f"),
        f(row["branching_factor"], "%.2f")))
