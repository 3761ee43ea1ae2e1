import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from amapf.assignment import build_cost_matrix, hungarian
from amapf.cspace import CSpaceMap
from amapf.errors import InfeasibleAssignment
from amapf.validation import brute_force_assignment

from helpers import square


def test_cost_matrix_single_pair():
    cm = build_cost_matrix([(0, 0)], [(3, 4)], CSpaceMap.build([]))
    assert cm.entries.tolist() == [[5.0]]
    assert cm.path(0, 0).length == pytest.approx(5.0)


def test_enclosed_goal_gives_infinite_column():
    ring = [(3.4 * math.cos(a), 3.4 * math.sin(a)) for a in np.linspace(0, 2 * math.pi, 8, endpoint=False)]
    cs = CSpaceMap.build([], blocked_goals=ring)
    cm = build_cost_matrix([(10, 0), (0, 10)], [(0, 0), (12, 12)], cs)
    assert np.isinf(cm.entries[:, 0]).all()
    assert np.isfinite(cm.entries[:, 1]).all()


def test_blocked_goal_never_shortens(rng):
    for _ in range(100):
        obstacles = [square(*rng.uniform(-6, 6, 2), 1.5)]
        cs = CSpaceMap.build(obstacles, arc_segments=16)
        pts = []
        while len(pts) < 5:
            p = rng.uniform(-12, 12, 2)
            if not any(r.contains(p[None], margin=0.0)[0] for r in cs.regions):
                if all(math.dist(p, q) > 4.5 for q in pts):
                    pts.append(p)
        S, T, block = pts[:2], pts[2:4], pts[4]
        before = build_cost_matrix(S, T, cs).entries
        after = build_cost_matrix(S, T, cs.with_blocked_goal(block)).entries
        assert np.all(after >= before - 1e-9)


def test_incremental_map_matches_rebuild(rng):
    cs = CSpaceMap.build([square(0, 0, 2), square(6, 1, 1)], arc_segments=16)
    inc = cs.with_blocked_goal((3.5, 8.0)).with_blocked_goal((-4.0, 2.0))
    fresh = CSpaceMap.build([square(0, 0, 2), square(6, 1, 1)], arc_segments=16, blocked_goals=[(3.5, 8.0), (-4.0, 2.0)])
    S, T = [(-8, -8), (12, 3)], [(10, 10), (-9, 7)]
    assert build_cost_matrix(S, T, inc).entries == pytest.approx(build_cost_matrix(S, T, fresh).entries)


def test_hungarian_small_examples():
    a = hungarian(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert a.perm == (0, 1) and a.total_cost == 2.0
    b = hungarian(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert b.perm == (1, 0) and b.total_cost == 2.0


def test_hungarian_ties_pick_smallest_permutation():
    assert hungarian(np.ones((4, 4))).perm == (0, 1, 2, 3)
    C = np.array([[1.0, 1.0, 5.0], [1.0, 1.0, 5.0], [5.0, 5.0, 1.0]])
    assert hungarian(C).perm == (0, 1, 2)


def test_hungarian_infinite_entries():
    C = np.array([[np.inf, 1.0], [2.0, np.inf]])
    assert hungarian(C).perm == (1, 0)
    with pytest.raises(InfeasibleAssignment):
        hungarian(np.array([[np.inf, np.inf], [1.0, 2.0]]))
    assert brute_force_assignment(np.full((3, 3), np.inf)) == math.inf


def test_hungarian_rejects_bad_shapes():
    with pytest.raises(ValueError):
        hungarian(np.ones((2, 3)))
    with pytest.raises(ValueError):
        hungarian(np.array([[np.nan]]))


@given(arrays(np.float64, (5, 5), elements=st.integers(0, 6).map(float)))
def test_hungarian_matches_enumeration_with_ties(C):
    got = hungarian(C)
    best = min(itertools.permutations(range(5)), key=lambda p: (sum(C[i, p[i]] for i in range(5)), p))
    assert got.total_cost == brute_force_assignment(C)
    assert got.perm == best


def test_hungarian_scales_to_thirty(rng):
    C = rng.uniform(0, 100, (30, 30))
    a = hungarian(C)
    assert sorted(a.perm) == list(range(30))
    from scipy.optimize import linear_sum_assignment

    r, c = linear_sum_assignment(C)
    assert a.total_cost == pytest.approx(C[r, c].sum(), rel=1e-12)
