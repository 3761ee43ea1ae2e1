"""Plan and check many random instances at separation 2 sqrt 3; print branch and cost statistics.

    python scripts/soundness_sweep.py --count 500 --max-agents 30 --max-obstacles 10
"""

import argparse
import collections
import math
import time

import numpy as np

from amapf.planner import PlannerConfig, plan
from amapf.scenario_io.generator import default_bounds, generate
from amapf.validation import check_solution

SEP = 2.0 * math.sqrt(3.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--max-agents", type=int, default=30)
    ap.add_argument("--max-obstacles", type=int, default=10)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    branches = collections.Counter()
    slack, failures, refined = [], [], 0
    t0 = time.perf_counter()
    for seed in range(args.count):
        m = int(rng.integers(2, args.max_agents + 1))
        k = int(rng.integers(0, args.max_obstacles + 1))
        inst = generate(m, k, default_bounds(m, SEP, k), SEP, seed)
        try:
            res = plan(inst, PlannerConfig())
        except Exception as exc:
            failures.append((seed, f"{type(exc).__name__}: {exc}"))
            continue
        if not check_solution(inst, res).passed:
            failures.append((seed, "check"))
        branches.update(t.branch for t in res.traces)
        refined += sum(t.refinements > 0 for t in res.traces)
        slack.append((res.sum_of_costs - res.initial_assignment_cost) / m)
    dt = time.perf_counter() - t0
    print(f"{args.count} instances in {dt:.1f}s, failures: {failures}")
    print(f"branches: {dict(branches)}, refined iterations: {refined}")
    if slack:
        print(f"detour per agent: mean {np.mean(slack):.4f}, max {np.max(slack):.4f} (bound 4)")


if __name__ == "__main__":
    main()
