"""Planar predicates and distances.

World unit is one agent radius. Scalar helpers work on plain tuples; the
``*_many`` / vectorized helpers take ``(n, 2)`` arrays and broadcast.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import SelfIntersectingInput

EPS = 1e-9
CLEARANCE_TOL = 1e-6

Point = tuple[float, float]


def as_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return (x, y)


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o); positive for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dist_point_segment(p, a, b) -> float:
    """Distance from ``p`` to the closed segment ``[a, b]`` (``a == b`` allowed)."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    u = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2
    u = min(1.0, max(0.0, u))
    return math.hypot(p[0] - (a[0] + u * dx), p[1] - (a[1] + u * dy))


def point_segment_distances(P, A, B) -> np.ndarray:
    """Broadcasting version of :func:`dist_point_segment`.

    ``P``, ``A``, ``B`` are arrays whose last axis has length 2.
    """
    P = np.asarray(P, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    d = B - A
    l2 = np.einsum("...i,...i->...", d, d)
    w = P - A
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.einsum("...i,...i->...", w, d) / l2
    u = np.where(l2 > 0.0, np.clip(u, 0.0, 1.0), 0.0)
    foot = A + u[..., None] * d
    return np.hypot(P[..., 0] - foot[..., 0], P[..., 1] - foot[..., 1])


def segment_circle_crossings(a, b, center, r: float) -> list[float]:
    """Segment parameters ``u`` in [0, 1] where ``|a + u (b - a) - center| == r``.

    Sorted ascending; a tangency yields one value.
    """
    dx, dy = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - center[0], a[1] - center[1]
    qa = dx * dx + dy * dy
    if qa == 0.0:
        return [0.0] if abs(math.hypot(fx, fy) - r) <= EPS else []
    qb = 2.0 * (fx * dx + fy * dy)
    qc = fx * fx + fy * fy - r * r
    disc = qb * qb - 4.0 * qa * qc
    # relative tolerance on the discriminant so exact tangencies survive rounding
    scale = max(qb * qb, abs(4.0 * qa * qc), 1.0)
    if disc < -1e-12 * scale:
        return []
    if disc <= 1e-12 * scale:
        roots = [-qb / (2.0 * qa)]
    else:
        s = math.sqrt(disc)
        # numerically stable pair
        q = -0.5 * (qb + math.copysign(s, qb))
        r1 = q / qa
        r2 = qc / q if q != 0.0 else r1
        roots = sorted({r1, r2})
    return [min(1.0, max(0.0, u)) for u in roots if -EPS <= u <= 1.0 + EPS]


def segments_intersect(A, B, C, D) -> np.ndarray:
    """Closed segments ``[A, B]`` and ``[C, D]`` share a point (broadcasting)."""
    A, B, C, D = (np.asarray(x, dtype=float) for x in (A, B, C, D))

    def orient(o, p, q):
        return (p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1]) - (p[..., 1] - o[..., 1]) * (
            q[..., 0] - o[..., 0]
        )

    d1 = orient(C, D, A)
    d2 = orient(C, D, B)
    d3 = orient(A, B, C)
    d4 = orient(A, B, D)
    proper = (np.sign(d1) * np.sign(d2) < 0) & (np.sign(d3) * np.sign(d4) < 0)

    def on_seg(o, p, q, d):
        # q collinear with o-p and inside its bounding box
        return (
            (d == 0)
            & (np.minimum(o[..., 0], p[..., 0]) <= q[..., 0])
            & (q[..., 0] <= np.maximum(o[..., 0], p[..., 0]))
            & (np.minimum(o[..., 1], p[..., 1]) <= q[..., 1])
            & (q[..., 1] <= np.maximum(o[..., 1], p[..., 1]))
        )

    touch = on_seg(C, D, A, d1) | on_seg(C, D, B, d2) | on_seg(A, B, C, d3) | on_seg(A, B, D, d4)
    return proper | touch


def segment_segment_distances(A, B, C, D) -> np.ndarray:
    A, B, C, D = (np.asarray(x, dtype=float) for x in (A, B, C, D))
    dmin = np.minimum(
        np.minimum(point_segment_distances(A, C, D), point_segment_distances(B, C, D)),
        np.minimum(point_segment_distances(C, A, B), point_segment_distances(D, A, B)),
    )
    return np.where(segments_intersect(A, B, C, D), 0.0, dmin)


def points_in_polygon(P, poly) -> np.ndarray:
    """Even-odd containment of points ``P`` (n, 2) in a simple polygon."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    V = np.asarray(poly, dtype=float)
    x, y = P[:, 0][:, None], P[:, 1][:, None]
    x1, y1 = V[:, 0][None, :], V[:, 1][None, :]
    x2, y2 = np.roll(V[:, 0], -1)[None, :], np.roll(V[:, 1], -1)[None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(invalid="ignore", divide="ignore"):
        xcross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = straddle & (x < xcross)
    return (np.count_nonzero(hits, axis=1) % 2) == 1


def polygon_edges(poly) -> tuple[np.ndarray, np.ndarray]:
    V = np.asarray(poly, dtype=float)
    return V, np.roll(V, -1, axis=0)


def points_polygon_distance(P, poly) -> np.ndarray:
    """Exact distance from points to a polygonal region (0 inside)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    E0, E1 = polygon_edges(poly)
    d = point_segment_distances(P[:, None, :], E0[None, :, :], E1[None, :, :]).min(axis=1)
    return np.where(points_in_polygon(P, poly), 0.0, d)


def segments_polygon_distance(A, B, poly) -> np.ndarray:
    """Exact distance from closed segments ``[A_k, B_k]`` to a polygonal region."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    E0, E1 = polygon_edges(poly)
    d = segment_segment_distances(
        A[:, None, :], B[:, None, :], E0[None, :, :], E1[None, :, :]
    ).min(axis=1)
    # a segment wholly inside never touches the boundary
    inside = points_in_polygon(A, poly)
    return np.where(inside, 0.0, d)


def polygon_signed_area(poly) -> float:
    V = np.asarray(poly, dtype=float)
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def is_simple(poly: Sequence) -> bool:
    V = np.asarray(poly, dtype=float)
    n = len(V)
    if n < 3:
        return False
    E0, E1 = polygon_edges(V)
    if np.any(np.all(E0 == E1, axis=1)):
        return False
    hit = segments_intersect(E0[:, None], E1[:, None], E0[None, :], E1[None, :])
    idx = np.arange(n)
    gap = (idx[None, :] - idx[:, None]) % n
    adjacent = (gap == 1) | (gap == n - 1) | (gap == 0)
    if np.any(hit & ~adjacent):
        return False
    # adjacent edges may only share their common vertex: reject folding back
    for i in range(n):
        a, b, c = V[i - 1], V[i], V[(i + 1) % n]
        if cross(a, b, c) == 0.0 and np.dot(b - a, c - b) < 0.0:
            return False
    return True


def as_polygon(vertices) -> np.ndarray:
    """Validate a vertex ring and return it as a CCW ``(n, 2)`` float array."""
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
        raise SelfIntersectingInput("polygon needs at least 3 vertices")
    if not np.all(np.isfinite(V)):
        raise SelfIntersectingInput("polygon has non-finite coordinates")
    area = polygon_signed_area(V)
    if abs(area) <= EPS:
        raise SelfIntersectingInput("polygon has zero area")
    if not is_simple(V):
        raise SelfIntersectingInput("polygon is not simple")
    if area < 0:
        V = V[::-1].copy()
    return V


def is_convex(poly) -> bool:
    """CCW polygon with no reflex vertex (collinear triples allowed)."""
    V = np.asarray(poly, dtype=float)
    P, N = np.roll(V, 1, axis=0), np.roll(V, -1, axis=0)
    c = (V[:, 0] - P[:, 0]) * (N[:, 1] - V[:, 1]) - (V[:, 1] - P[:, 1]) * (N[:, 0] - V[:, 0])
    return bool(np.all(c >= -EPS))
