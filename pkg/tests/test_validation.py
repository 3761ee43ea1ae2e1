import dataclasses
import math

import numpy as np
import pytest

from amapf.geometry import PolyPath
from amapf.planner import Instance, Move, PlanResult, plan
from amapf.validation import (
    Unreachable,
    brute_force_assignment,
    check_solution,
    cost_bound_check,
    grid_path_oracle,
)

from helpers import square


def test_single_straight_plan_passes():
    inst = Instance([], [(0, 0)], [(5, 0)])
    rep = check_solution(inst, plan(inst))
    assert rep.passed and rep.endpoint_coverage
    assert rep.min_obstacle_clearance == math.inf


def _two_agent(second_waypoints):
    inst = Instance([], [(0, 0), (10, 0)], [(0, 20), (10, 20)])
    moves = (
        Move(0, PolyPath.straight((0, 0), (0, 20))),
        Move(1, PolyPath(second_waypoints)),
    )
    total = sum(m.path.length for m in moves)
    return inst, PlanResult(moves, total, 40.0, ())


def test_tampered_move_close_to_parked_agent():
    # second move swings to 1.9 from agent 0, already parked at (0, 20)
    inst, res = _two_agent([(10, 0), (1.9, 20), (10, 20)])
    rep = check_solution(inst, res)
    assert not rep.passed
    v = [x for x in rep.violations if x["kind"] == "interagent"]
    assert len(v) == 1
    assert v[0]["move"] == 1 and v[0]["other"] == 0 and v[0]["other_at"] == "goal_of"
    assert v[0]["distance"] == pytest.approx(1.9)


def test_moving_past_waiting_start_is_flagged():
    inst = Instance([], [(0, 0), (10, 0)], [(0, 20), (20, 0)])
    moves = (Move(0, PolyPath([(0, 0), (8, 1.5), (12, 1.5), (0, 20)])), Move(1, PolyPath.straight((10, 0), (20, 0))))
    res = PlanResult(moves, sum(m.path.length for m in moves), 30.0, ())
    v = check_solution(inst, res).violations
    assert v[0]["kind"] == "interagent" and v[0]["other_at"] == "start"
    assert v[0]["distance"] == pytest.approx(1.5)


def test_exact_contact_is_legal():
    inst, res = _two_agent([(10, 0), (2.0, 20)])
    inst = dataclasses.replace(inst, goals=((0, 20), (2.0, 20)))
    rep = check_solution(inst, dataclasses.replace(res, initial_assignment_cost=res.sum_of_costs))
    assert rep.passed, rep.violations


def test_obstacle_contact_flagged():
    inst = Instance([square(4, -1, 2)], [(0, 0)], [(10, 0)])
    res = PlanResult((Move(0, PolyPath.straight((0, 0), (10, 0))),), 10.0, 10.0, ())
    rep = check_solution(inst, res)
    assert not rep.passed and rep.violations[0]["kind"] == "obstacle"
    assert rep.min_obstacle_clearance == 0.0


def test_coverage_failures():
    inst = Instance([], [(0, 0), (10, 0)], [(0, 20), (10, 20)])
    twice = (Move(0, PolyPath.straight((0, 0), (0, 20))), Move(0, PolyPath.straight((0, 20), (10, 20))))
    rep = check_solution(inst, PlanResult(twice, 30.0, 40.0, ()))
    assert not rep.endpoint_coverage
    short = (Move(0, PolyPath.straight((0, 0), (0, 20))),)
    assert not check_solution(inst, PlanResult(short, 20.0, 40.0, ())).endpoint_coverage


def test_cost_bound():
    inst = Instance([], [(0, 0)], [(5, 0)])
    res = plan(inst)
    assert cost_bound_check(res, 1)
    assert res.sum_of_costs == res.initial_assignment_cost  # full slack of 4m left
    bloated = PlanResult((Move(0, PolyPath([(0, 0), (0, 5), (5, 0)])),), 5 + 5 + math.sqrt(50), 5.0, ())
    assert not cost_bound_check(bloated, 1)
    rep = check_solution(inst, bloated)
    assert not rep.passed and not rep.cost_bound_ok


def test_cost_mismatch_reported():
    inst = Instance([], [(0, 0)], [(5, 0)])
    res = PlanResult((Move(0, PolyPath.straight((0, 0), (5, 0))),), 4.0, 5.0, ())
    assert check_solution(inst, res).violations[0]["kind"] == "cost_mismatch"


def test_reroute_detours_fit_the_bound():
    inst = Instance([], [(10, 0), (3.5, 0.5)], [(0, 0), (3.5, 6)])
    res = plan(inst, first_move=(0, 0, PolyPath.straight((10, 0), (0, 0))))
    k = sum(t.branch != "direct" for t in res.traces)
    assert res.sum_of_costs - res.initial_assignment_cost <= 4 * k


def test_brute_force_examples():
    assert brute_force_assignment(np.array([[1.0, 2.0], [2.0, 1.0]])) == 2.0
    assert brute_force_assignment(np.full((2, 2), np.inf)) == math.inf
    with pytest.raises(ValueError):
        brute_force_assignment(np.zeros((9, 9)))


def test_grid_oracle_empty_scene():
    assert grid_path_oracle([], (0, 0), (10, 0), cell=0.05) == pytest.approx(10.0, abs=0.05)


def test_grid_oracle_enclosed_start():
    walls = [
        [(-6, -6), (6, -6), (6, -5), (-6, -5)],
        [(-6, 5), (6, 5), (6, 6), (-6, 6)],
        [(-6, -5), (-5, -5), (-5, 5), (-6, 5)],
        [(5, -5), (6, -5), (6, 5), (5, 5)],
    ]
    with pytest.raises(Unreachable):
        grid_path_oracle(walls, (0, 0), (10, 10), cell=0.1)
