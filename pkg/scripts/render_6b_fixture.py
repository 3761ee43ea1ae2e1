"""Replay the hand-built branch-6b configuration and save its solution and picture.

The first iteration is forced onto the straight geodesic (10,0) -> (0,0); the
agent parked at (3.5, 0.5) blocks it within 2 of the goal and cuts in at (2, 0).
"""

import argparse
from pathlib import Path

from amapf.geometry import PolyPath
from amapf.planner import Instance, plan
from amapf.scenario_io.formats import SolutionFile, serialize_instance, serialize_solution
from amapf.scenario_io.render import render_svg
from amapf.validation import check_solution


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="runs/fixture_6b")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    inst = Instance([], [(10.0, 0.0), (3.5, 0.5)], [(0.0, 0.0), (3.5, 6.0)])
    res = plan(inst, first_move=(0, 0, PolyPath.straight((10.0, 0.0), (0.0, 0.0))))
    rep = check_solution(inst, res)
    (out / "instance.json").write_bytes(serialize_instance(inst))
    (out / "solution.json").write_bytes(serialize_solution(SolutionFile.from_plan(inst, res, rep)))
    (out / "plan.svg").write_bytes(render_svg(inst, res))
    for tr in res.traces:
        print(tr)
    print("check passed:", rep.passed)


if __name__ == "__main__":
    main()
