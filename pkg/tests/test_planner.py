import math

import numpy as np
import pytest

from amapf.assignment import Assignment
from amapf.errors import ClassicAssumptionViolated, SeparationViolation, StandaloneNotFound
from amapf.geometry import PolyPath
from amapf.planner import (
    Instance,
    PlannerConfig,
    build_reroute,
    find_last_blocker,
    find_standalone_goal,
    plan,
    validate_separation,
)
from amapf.validation import check_solution

from helpers import SQRT3x2, square


# separation


def test_separation_threshold_boundary():
    inst = Instance([], [(0, 0), (SQRT3x2, 0)], [(0, 20), (SQRT3x2, 20)])
    assert validate_separation(inst, SQRT3x2).passed
    assert not validate_separation(inst, 4.0).passed


def test_goal_at_sqrt5_from_obstacle_passes():
    inst = Instance([square(0, 0, 1)], [(10, 10)], [(1 + math.sqrt(5), 0.5)])
    assert validate_separation(inst, SQRT3x2).passed


def test_start_on_goal_is_violation():
    rep = validate_separation(Instance([], [(0, 0)], [(0, 0)]), SQRT3x2)
    assert not rep.passed
    assert rep.pair_violations[0][:4] == ("start", 0, "goal", 0)


def test_plan_rejects_inadmissible_instance():
    with pytest.raises(SeparationViolation):
        plan(Instance([], [(0, 0), (3, 0)], [(0, 10), (10, 10)]))


# standalone goal


def test_standalone_single_agent():
    p = [PolyPath.straight((0, 0), (5, 0))]
    assert find_standalone_goal(p, Assignment((0,), 5.0), [(5, 0)]) == 0


def test_standalone_parallel_paths():
    paths = [PolyPath.straight((0, 0), (10, 0)), PolyPath.straight((0, 10), (10, 10))]
    assert find_standalone_goal(paths, Assignment((0, 1), 20.0), [(10, 0), (10, 10)]) == 0


def test_standalone_excludes_goal_near_other_path():
    goals = [(0, 0), (10, 1.5)]
    paths = [PolyPath.straight((-10, 1.5), (10, 1.5)), PolyPath.straight((0, -20), (0, 0))]
    # agent 1 ends at goal 0; agent 0's path passes 1.5 from goal 0
    assert find_standalone_goal(paths, Assignment((1, 0), 0.0), goals) == 1
    with pytest.raises(StandaloneNotFound):
        tight = [PolyPath.straight((-10, 1.5), (10, 1.5)), PolyPath.straight((20, 0), (0, 0))]
        find_standalone_goal(tight, Assignment((1, 0), 0.0), goals)


# blockers and reroutes


def test_last_blocker_examples():
    p = PolyPath.straight((0, 0), (10, 0))
    agent, t = find_last_blocker(p, 0, [(1, (5, 1))])
    assert agent == 1 and t == pytest.approx((5 + math.sqrt(3)) / 10)
    assert find_last_blocker(p, 0, [(1, (5, 3)), (2, (0, -2.5))]) is None
    assert find_last_blocker(p, 0, [(1, (3, 1)), (2, (7, 1))])[0] == 2


def test_last_blocker_ignores_mover():
    p = PolyPath.straight((0, 0), (10, 0))
    assert find_last_blocker(p, 0, [(0, (0, 0))]) is None


def test_reroute_6a():
    p = PolyPath.straight((10, 0), (0, 0))
    _, t = find_last_blocker(p, 0, [(1, (5, 1))])
    path, branch = build_reroute(p, (0, 0), (5, 1), t)
    assert branch == "6a"
    assert path.waypoints == pytest.approx(np.array([(5, 1), (5 - math.sqrt(3), 0), (0, 0)]))


def test_reroute_6b_analytic():
    p = PolyPath.straight((10, 0), (0, 0))
    _, t = find_last_blocker(p, 0, [(1, (3.5, 0.5))])
    assert p.point_at(t)[0] == pytest.approx(3.5 - math.sqrt(3.75))
    path, branch = build_reroute(p, (0, 0), (3.5, 0.5), t)
    assert branch == "6b"
    assert path.waypoints[1] == pytest.approx((2.0, 0.0), abs=1e-12)
    assert math.dist(path.waypoints[0], path.waypoints[1]) == pytest.approx(math.sqrt(2.5), abs=1e-9)


def test_reroute_boundary_is_6a():
    # the blocking supremum lands exactly 2 from the goal
    p = PolyPath.straight((10, 0), (0, 0))
    blocker = (4.0, math.sqrt(3.0))  # disk of radius 2 meets the axis at x = 3 and x = 5
    _, t = find_last_blocker(p, 0, [(1, blocker)])
    goal = (1.0, 0.0)
    assert math.dist(p.point_at(t), goal) == pytest.approx(2.0)
    _, branch = build_reroute(p, goal, blocker, t)
    assert branch == "6a"


# whole runs


def test_single_agent_direct():
    res = plan(Instance([], [(0, 0)], [(5, 0)]))
    assert len(res.moves) == 1 and res.traces[0].branch == "direct"
    assert res.sum_of_costs == 5.0 == res.initial_assignment_cost


def test_forced_first_move_replays_6b_construction():
    inst = Instance([], [(10, 0), (3.5, 0.5)], [(0, 0), (3.5, 6)])
    res = plan(inst, first_move=(0, 0, PolyPath.straight((10, 0), (0, 0))))
    tr = res.traces[0]
    assert tr.branch == "6b" and tr.committed_agent == 1 and tr.suffix_straight
    assert tr.prefix_length == pytest.approx(math.sqrt(2.5), abs=1e-9)
    assert check_solution(inst, res).passed


def test_forced_first_move_validates_endpoints():
    inst = Instance([], [(10, 0), (3.5, 0.5)], [(0, 0), (3.5, 6)])
    with pytest.raises(ValueError):
        plan(inst, first_move=(0, 0, PolyPath.straight((9, 0), (0, 0))))


def test_two_agent_6b_embedding_is_unreachable_by_optimal_assignment():
    """Whatever goal the blocker at (3.5, 0.5) gets, an optimal assignment that
    sends the agent at (10, 0) to (0, 0) leaves (0, 0) within 2 of the blocker's
    own path, so (0, 0) is never standalone and the 6b move cannot be chosen."""
    s0, s1, g0 = np.array([10.0, 0.0]), np.array([3.5, 0.5]), np.array([0.0, 0.0])
    xs = np.arange(-60.0, 60.0, 0.05)
    X, Y = np.meshgrid(xs, xs)
    G = np.stack([X.ravel(), Y.ravel()], axis=1)
    d = lambda P, q: np.hypot(*(P - q).T)
    admissible = (d(G, s0) >= SQRT3x2) & (d(G, s1) >= SQRT3x2) & (d(G, g0) >= SQRT3x2)
    keeps = 10.0 + d(G, s1) <= d(G, s0) + math.dist(s1, g0)  # identity assignment optimal
    cand = G[admissible & keeps]
    u = cand - s1
    tt = np.clip((-s1 @ u.T) / np.einsum("ij,ij->i", u, u), 0, 1)
    clearance = np.hypot(*(s1 + tt[:, None] * u).T)
    assert cand.size and clearance.max() < 2.0


def test_classic_mode_solves_wide_instance():
    with pytest.raises(ValueError):
        PlannerConfig(mode="classic", separation_threshold=SQRT3x2)
    wide = Instance([], [(20, 0), (3.0, 3.0)], [(0, 0), (3.0, 12)])
    res = plan(wide, PlannerConfig(mode="classic"))
    assert check_solution(wide, res).passed


def test_classic_mode_refuses_6b(monkeypatch):
    # separation 4 rules the 6b geometry out, so bypass the precondition to reach the guard
    import amapf.planner as planner

    real = planner.validate_separation
    monkeypatch.setattr(planner, "validate_separation", lambda inst, thr: real(inst, SQRT3x2))
    inst = Instance([], [(10, 0), (3.5, 0.5)], [(0, 0), (3.5, 6)])
    with pytest.raises(ClassicAssumptionViolated) as err:
        plan(inst, PlannerConfig(mode="classic"), first_move=(0, 0, PolyPath.straight((10, 0), (0, 0))))
    assert err.value.traces == []


def test_obstacle_scene_round_trip():
    inst = Instance(
        [square(4, -1, 2), [(10, 6), (13, 6), (11.5, 9)]],
        [(0, 0), (0, 6), (16, 0)],
        [(16, 6), (8, 12), (0, -6)],
    )
    res = plan(inst)
    rep = check_solution(inst, res)
    assert rep.passed, rep.violations
    assert rep.min_obstacle_clearance >= 1.0 - 1e-6
    assert res.sum_of_costs <= res.initial_assignment_cost + 4 * inst.m
