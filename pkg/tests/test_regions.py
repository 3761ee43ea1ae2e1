import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from amapf.geometry import (
    disk_region,
    inflate_polygon,
    points_polygon_distance,
    polygon_signed_area,
)
from amapf.geometry.regions import convex_decomposition, triangulate

from helpers import square


def test_square_area_between_exact_and_secant_bound():
    N = 64
    reg = inflate_polygon(square(0, 0, 1), 1.0, N)
    area = polygon_signed_area(reg.boundary)
    exact = 5.0 + math.pi
    assert exact <= area <= exact / math.cos(math.pi / N) ** 2


def test_triangle_contains_all_points_within_one(rng):
    tri = np.array([(0, 0), (4, 0), (0, 4)], dtype=float)
    reg = inflate_polygon(tri, 1.0, 64)
    P = rng.uniform(-1.5, 5.5, size=(40000, 2))
    near = P[points_polygon_distance(P, tri) < 1.0][:10000]
    assert len(near) == 10000
    assert reg.contains(near, margin=0.0).all()


def test_finer_arcs_are_nested(rng):
    coarse = inflate_polygon(square(0, 0, 1), 1.0, 8)
    fine = inflate_polygon(square(0, 0, 1), 1.0, 64)
    P = rng.uniform(-2.5, 3.5, size=(20000, 2))
    inside_fine = fine.contains(P, margin=0.0)
    assert coarse.contains(P[inside_fine], margin=0.0).all()


def test_disk_region_square():
    reg = disk_region((0, 0), 2.0, 4)
    assert len(reg.boundary) == 4
    assert np.hypot(*reg.boundary.T) == pytest.approx([2 * math.sqrt(2)] * 4)


@given(st.floats(-100, 100), st.floats(-100, 100))
def test_disk_region_vertex_radius(x, y):
    reg = disk_region((x, y), 2.0, 64)
    r = np.hypot(reg.boundary[:, 0] - x, reg.boundary[:, 1] - y)
    assert r == pytest.approx(np.full(64, 2.0 / math.cos(math.pi / 64)), rel=1e-12)


def test_disk_region_contains_open_disk(rng):
    reg = disk_region((3, -1), 2.0, 64)
    ang = rng.uniform(0, 2 * math.pi, 10000)
    rad = 2.0 * np.sqrt(rng.uniform(0, 1, 10000)) * (1 - 1e-12)
    P = np.stack([3 + rad * np.cos(ang), -1 + rad * np.sin(ang)], axis=1)
    assert reg.contains(P, margin=0.0).all()


def test_concave_polygon_inflation_covers_source(rng):
    L = np.array([(0, 0), (4, 0), (4, 1), (1, 1), (1, 4), (0, 4)], dtype=float)
    reg = inflate_polygon(L, 1.0, 32)
    assert len(reg.parts) >= 2
    P = rng.uniform(-1.5, 5.5, size=(30000, 2))
    d = points_polygon_distance(P, L)
    assert reg.contains(P[d < 1.0], margin=0.0).all()
    # the notch far from the L stays free
    assert not reg.contains(np.array([(3.0, 3.0)]), margin=0.0)[0]


def test_decomposition_preserves_area():
    L = np.array([(0, 0), (4, 0), (4, 1), (1, 1), (1, 4), (0, 4)], dtype=float)
    tris = triangulate(L)
    assert sum(polygon_signed_area(t) for t in tris) == pytest.approx(7.0)
    parts = convex_decomposition(L)
    assert sum(polygon_signed_area(p) for p in parts) == pytest.approx(7.0)
    assert len(parts) < len(tris)


def test_inflation_rejects_bad_arguments():
    with pytest.raises(ValueError):
        inflate_polygon(square(0, 0, 1), 0.0, 64)
    with pytest.raises(ValueError):
        inflate_polygon(square(0, 0, 1), 1.0, 4)
