"""Configuration-space obstacles.

Every region is a *circumscribed* polygonal approximation of a Minkowski sum
with a disk: arcs are replaced by chains of tangent segments, so the polygon
always contains the exact inflated set and clearance guarantees survive the
approximation. Non-convex sources are split into convex pieces; the union of
the inflated pieces equals the inflated source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .primitives import EPS, as_polygon, cross, is_convex, points_polygon_distance

DEFAULT_ARC_SEGMENTS = 64


@dataclass(frozen=True, eq=False)
class ConvexPart:
    """A convex CCW polygon with cached half-plane form ``normals @ x <= offsets``."""

    vertices: np.ndarray
    normals: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)
    center: np.ndarray = field(init=False, repr=False)
    r_out: float = field(init=False, repr=False)
    r_in: float = field(init=False, repr=False)

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        e = np.roll(V, -1, axis=0) - V
        ln = np.hypot(e[:, 0], e[:, 1])
        keep = ln > 0
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)[keep] / ln[keep, None]
        c = np.einsum("ij,ij->i", n, V[keep])
        center = V.mean(axis=0)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "offsets", c)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "r_out", float(np.max(np.hypot(*(V - center).T))))
        object.__setattr__(self, "r_in", float(max(0.0, np.min(c - n @ center))))

    def depth(self, P) -> np.ndarray:
        """Signed depth of points inside the part (positive = interior)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return np.min(self.offsets[None, :] - P @ self.normals.T, axis=1)


@dataclass(frozen=True, eq=False)
class InflatedRegion:
    boundary: np.ndarray
    source_kind: str  # "polygon" | "disk"
    radius: float
    arc_segments: int
    source: np.ndarray  # polygon vertices, or the disk center as shape (2,)
    parts: tuple[ConvexPart, ...]

    def contains(self, P, margin: float = EPS) -> np.ndarray:
        """Points strictly inside (deeper than ``margin``) any convex part."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        inside = np.zeros(len(P), dtype=bool)
        for part in self.parts:
            inside |= part.depth(P) > margin
        return inside

    def source_distance(self, P) -> np.ndarray:
        """Exact distance from points to the un-inflated source."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if self.source_kind == "disk":
            return np.maximum(0.0, np.hypot(*(P - self.source).T))
        return points_polygon_distance(P, self.source)


def _arc_chain(vertex, n_from, n_to, r, arc_segments) -> list[tuple[float, float]]:
    """Tangent chain around ``vertex`` from outward normal ``n_from`` to ``n_to`` (CCW)."""
    theta = math.atan2(
        n_from[0] * n_to[1] - n_from[1] * n_to[0], n_from[0] * n_to[0] + n_from[1] * n_to[1]
    )
    if theta < 0.0:
        theta += 2.0 * math.pi
    step = 2.0 * math.pi / arc_segments
    k = max(1, math.ceil(theta / step - 1e-12))
    delta = theta / k
    rho = r / math.cos(delta / 2.0)
    phi0 = math.atan2(n_from[1], n_from[0])
    return [
        (
            vertex[0] + rho * math.cos(phi0 + (i + 0.5) * delta),
            vertex[1] + rho * math.sin(phi0 + (i + 0.5) * delta),
        )
        for i in range(k)
    ]


def _offset_convex(V: np.ndarray, r: float, arc_segments: int) -> np.ndarray:
    n = len(V)
    normals = []
    for i in range(n):
        a, b = V[i], V[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        ln = math.hypot(ex, ey)
        normals.append((ey / ln, -ex / ln))
    out: list[tuple[float, float]] = []
    for i in range(n):
        n_in, n_out = normals[i - 1], normals[i]
        if abs(n_in[0] * n_out[1] - n_in[1] * n_out[0]) <= EPS and n_in[0] * n_out[0] + n_in[1] * n_out[1] > 0:
            # collinear vertex: offset lines coincide, no arc
            continue
        out.extend(_arc_chain(V[i], n_in, n_out, r, arc_segments))
    return np.asarray(out, dtype=float)


def _drop_collinear(V: np.ndarray) -> np.ndarray:
    keep = [i for i in range(len(V)) if abs(cross(V[i - 1], V[i], V[(i + 1) % len(V)])) > EPS]
    return V[keep]


def triangulate(V: np.ndarray) -> list[np.ndarray]:
    """Ear-clipping triangulation of a simple CCW polygon."""
    idx = list(range(len(V)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * len(V) ** 2:
            raise RuntimeError("ear clipping did not converge")
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            a, b, c = V[i0], V[i1], V[i2]
            if cross(a, b, c) <= EPS:
                continue
            others = [V[j] for j in idx if j not in (i0, i1, i2)]
            if any(
                cross(a, b, p) >= 0 and cross(b, c, p) >= 0 and cross(c, a, p) >= 0 for p in others
            ):
                continue
            tris.append(np.array([a, b, c]))
            del idx[k]
            break
    tris.append(V[idx])
    return tris


def convex_decomposition(V: np.ndarray) -> list[np.ndarray]:
    """Triangulate, then greedily merge neighbours whose union stays convex."""
    pieces = [list(map(tuple, t)) for t in triangulate(V)]
    merged = True
    while merged:
        merged = False
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                union = _merge_on_shared_edge(pieces[i], pieces[j])
                if union is not None and is_convex(np.asarray(union)):
                    pieces[i] = union
                    del pieces[j]
                    merged = True
                    break
            if merged:
                break
    return [np.asarray(p, dtype=float) for p in pieces]


def _merge_on_shared_edge(p, q):
    n, m = len(p), len(q)
    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        for j in range(m):
            if q[j] == b and q[(j + 1) % m] == a:
                # walk p from b around to a, then q from a around to b
                ring = [p[(i + 1 + k) % n] for k in range(n)]
                ring += [q[(j + 2 + k) % m] for k in range(m - 2)]
                return ring
    return None


def inflate_polygon(poly, r: float = 1.0, arc_segments: int = DEFAULT_ARC_SEGMENTS) -> InflatedRegion:
    """Circumscribed approximation of ``poly`` grown by a disk of radius ``r``.

    Raises SelfIntersectingInput for non-simple or zero-area input.
    """
    if r <= 0:
        raise ValueError("inflation radius must be positive")
    if arc_segments < 8:
        raise ValueError("arc_segments must be at least 8")
    V = as_polygon(poly)
    core = _drop_collinear(V)
    if is_convex(core):
        boundary = _offset_convex(core, r, arc_segments)
        parts = (ConvexPart(boundary),)
    else:
        pieces = [_offset_convex(_drop_collinear(p), r, arc_segments) for p in convex_decomposition(core)]
        parts = tuple(ConvexPart(p) for p in pieces)
        boundary = _union_outline(pieces)
    return InflatedRegion(
        boundary=boundary,
        source_kind="polygon",
        radius=float(r),
        arc_segments=int(arc_segments),
        source=V,
        parts=parts,
    )


def _union_outline(pieces) -> np.ndarray:
    from shapely.geometry import Polygon as ShapelyPolygon
    from shapely.ops import unary_union

    u = unary_union([ShapelyPolygon(p) for p in pieces])
    if u.geom_type != "Polygon":
        u = max(u.geoms, key=lambda g: g.area)
    ring = np.asarray(u.exterior.coords, dtype=float)[:-1]
    return as_polygon(ring)


def disk_region(center, r: float, arc_segments: int = DEFAULT_ARC_SEGMENTS) -> InflatedRegion:
    """Regular ``arc_segments``-gon circumscribing the disk of radius ``r``."""
    if r <= 0:
        raise ValueError("disk radius must be positive")
    if arc_segments < 3:
        raise ValueError("arc_segments must be at least 3")
    c = np.asarray(center, dtype=float)
    rho = r / math.cos(math.pi / arc_segments)
    ang = (np.arange(arc_segments) + 0.5) * (2.0 * math.pi / arc_segments)
    boundary = c + rho * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return InflatedRegion(
        boundary=boundary,
        source_kind="disk",
        radius=float(r),
        arc_segments=int(arc_segments),
        source=c,
        parts=(ConvexPart(boundary),),
    )


def wall_polygons(bounds, thickness: float = 1.0) -> list[np.ndarray]:
    """Four rectangles fencing the box ``(x0, y0, x1, y1)`` from outside."""
    x0, y0, x1, y1 = map(float, bounds)
    t = thickness
    return [
        np.array([[x0 - t, y0 - t], [x0, y0 - t], [x0, y1 + t], [x0 - t, y1 + t]]),
        np.array([[x1, y0 - t], [x1 + t, y0 - t], [x1 + t, y1 + t], [x1, y1 + t]]),
        np.array([[x0 - t, y0 - t], [x1 + t, y0 - t], [x1 + t, y0], [x0 - t, y0]]),
        np.array([[x0 - t, y1], [x1 + t, y1], [x1 + t, y1 + t], [x0 - t, y1 + t]]),
    ]
