import math

import numpy as np
import pytest

from amapf.errors import TerminalInsideObstacle
from amapf.geometry import (
    build_visibility_graph,
    disk_region,
    inflate_polygon,
    segments_blocked,
    shortest_path,
)
from amapf.validation import grid_path_oracle

from helpers import square


def test_empty_scene_single_edge():
    vg = build_visibility_graph([], [(0, 0), (5, 5)])
    assert len(vg.edges) == 1
    assert vg.weights[0] == pytest.approx(5 * math.sqrt(2))


def test_blocked_sightline():
    reg = inflate_polygon(square(-1, -1, 2), 1.0, 32)
    vg = build_visibility_graph([reg], [(-5, 0), (5, 0)])
    assert not vg.has_edge(vg.terminal_node(0), vg.terminal_node(1))
    path = shortest_path(vg, (-5, 0), (5, 0))
    assert path is not None and path.length > 10.0


def test_visibility_symmetric_on_random_scenes(rng):
    for _ in range(100):
        regions = [
            inflate_polygon(square(*rng.uniform(-8, 8, 2), float(rng.uniform(0.5, 2))), 1.0, 16)
            for _ in range(int(rng.integers(1, 4)))
        ]
        T = []
        while len(T) < 4:
            p = rng.uniform(-12, 12, 2)
            if not any(r.contains(p[None], margin=0.0)[0] for r in regions):
                T.append(p)
        vg = build_visibility_graph(regions, T)
        parts = [p for r in regions for p in r.parts]
        i, j = np.triu_indices(len(vg.nodes), k=1)
        fwd = segments_blocked(vg.nodes[i], vg.nodes[j], parts)
        back = segments_blocked(vg.nodes[j], vg.nodes[i], parts)
        assert np.array_equal(fwd, back)
        # every graph edge is an unblocked sightline
        E = vg.edges
        assert not segments_blocked(vg.nodes[E[:, 0]], vg.nodes[E[:, 1]], parts).any()


def test_straight_path_in_empty_scene():
    vg = build_visibility_graph([], [(0, 0), (3, 4)])
    p = shortest_path(vg, (0, 0), (3, 4))
    assert p.length == pytest.approx(5.0)
    assert len(p.waypoints) == 2


def test_square_obstacle_against_grid_oracle():
    sq = square(-1, -1, 2)
    reg = inflate_polygon(sq, 1.0, 64)
    vg = build_visibility_graph([reg], [(-4, 0.2), (4, -0.3)])
    vg_len = shortest_path(vg, (-4, 0.2), (4, -0.3)).length
    grid = grid_path_oracle([sq], (-4, 0.2), (4, -0.3), cell=0.05)
    assert vg_len <= grid
    assert grid <= 1.02 * vg_len


def test_enclosed_terminal_is_unreachable():
    walls = [
        [(-6, -6), (6, -6), (6, -5), (-6, -5)],
        [(-6, 5), (6, 5), (6, 6), (-6, 6)],
        [(-6, -5), (-5, -5), (-5, 5), (-6, 5)],
        [(5, -5), (6, -5), (6, 5), (5, 5)],
    ]
    regions = [inflate_polygon(w, 1.0, 16) for w in walls]
    vg = build_visibility_graph(regions, [(0, 0), (20, 0)])
    assert shortest_path(vg, (0, 0), (20, 0)) is None


def test_terminal_inside_region_rejected():
    with pytest.raises(TerminalInsideObstacle):
        build_visibility_graph([disk_region((0, 0), 2.0, 32)], [(0.5, 0), (10, 0)])


def test_segments_blocked_vectorized():
    reg = disk_region((0, 0), 1.0, 32)
    A = np.array([(-3, 0), (-3, 3), (-3, 1.0 / math.cos(math.pi / 32) + 1e-6)])
    B = np.array([(3, 0), (3, 3), (3, 1.0 / math.cos(math.pi / 32) + 1e-6)])
    assert segments_blocked(A, B, reg.parts).tolist() == [True, False, False]
