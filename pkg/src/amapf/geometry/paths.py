"""Polyline paths parameterized by normalized arc length on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .primitives import EPS, point_segment_distances, segment_circle_crossings


@dataclass(frozen=True, eq=False)
class PolyPath:
    waypoints: np.ndarray
    cumulative_lengths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.waypoints, dtype=float))
        if W.shape[0] < 1 or W.shape[1] != 2:
            raise ValueError("a path needs at least one 2-D waypoint")
        seg = np.hypot(*np.diff(W, axis=0).T) if len(W) > 1 else np.zeros(0)
        object.__setattr__(self, "waypoints", W)
        object.__setattr__(self, "cumulative_lengths", np.concatenate([[0.0], np.cumsum(seg)]))

    @classmethod
    def straight(cls, a, b) -> "PolyPath":
        return cls(np.array([a, b], dtype=float))

    @property
    def length(self) -> float:
        return float(self.cumulative_lengths[-1])

    @property
    def start(self) -> tuple[float, float]:
        return tuple(self.waypoints[0])

    @property
    def end(self) -> tuple[float, float]:
        return tuple(self.waypoints[-1])

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        if len(self.waypoints) == 1:
            return self.waypoints, self.waypoints
        return self.waypoints[:-1], self.waypoints[1:]

    def locate(self, t: float) -> tuple[int, float]:
        """Segment index and in-segment parameter for global parameter ``t``."""
        L = self.length
        n = len(self.waypoints)
        if n == 1 or L == 0.0:
            return 0, 0.0
        s = min(max(t, 0.0), 1.0) * L
        k = int(np.searchsorted(self.cumulative_lengths, s, side="right") - 1)
        k = min(max(k, 0), n - 2)
        seg = self.cumulative_lengths[k + 1] - self.cumulative_lengths[k]
        u = 0.0 if seg == 0.0 else (s - self.cumulative_lengths[k]) / seg
        return k, min(max(u, 0.0), 1.0)

    def point_at(self, t: float) -> tuple[float, float]:
        if t <= 0.0:
            return self.start
        if t >= 1.0:
            return self.end
        k, u = self.locate(t)
        a, b = self.waypoints[k], self.waypoints[k + 1]
        return (float(a[0] + u * (b[0] - a[0])), float(a[1] + u * (b[1] - a[1])))

    def segment_params(self) -> tuple[np.ndarray, np.ndarray]:
        """Global parameters at the start and end of every segment."""
        L = self.length
        if L == 0.0:
            z = np.zeros(max(len(self.waypoints) - 1, 1))
            return z, z
        c = self.cumulative_lengths / L
        return c[:-1], c[1:]


def concat(*paths: PolyPath) -> PolyPath:
    """Join paths end-to-start, merging the shared waypoint."""
    pts = [paths[0].waypoints]
    for p in paths[1:]:
        W = p.waypoints
        if np.allclose(pts[-1][-1], W[0], rtol=0.0, atol=EPS):
            W = W[1:]
        pts.append(W)
    return PolyPath(np.concatenate(pts, axis=0))


def path_point_min_dist(path: PolyPath, p) -> tuple[float, float]:
    """Minimum distance from ``p`` to ``path`` and the smallest parameter attaining it."""
    W = path.waypoints
    if len(W) == 1:
        return float(math.hypot(W[0, 0] - p[0], W[0, 1] - p[1])), 0.0
    A, B = W[:-1], W[1:]
    d = point_segment_distances(np.asarray(p, dtype=float)[None, :], A, B)
    k = int(np.argmin(d))
    a, b = A[k], B[k]
    ab = b - a
    l2 = float(ab @ ab)
    u = 0.0 if l2 == 0.0 else min(1.0, max(0.0, float((np.asarray(p) - a) @ ab) / l2))
    L = path.length
    t = 0.0 if L == 0.0 else (path.cumulative_lengths[k] + u * math.sqrt(l2)) / L
    return float(d[k]), float(min(1.0, t))


def path_min_dist_many(path: PolyPath, P) -> np.ndarray:
    """Minimum distance from each point of ``P`` to ``path`` (no parameter)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    A, B = path.segments()
    return point_segment_distances(P[:, None, :], A[None, :, :], B[None, :, :]).min(axis=1)


def path_blocking_intervals(path: PolyPath, center, r: float) -> list[tuple[float, float]]:
    """Maximal parameter intervals where ``|path(t) - center| < r``, ascending and disjoint."""
    W = path.waypoints
    c = (float(center[0]), float(center[1]))
    if len(W) == 1 or path.length == 0.0:
        d = math.hypot(W[0, 0] - c[0], W[0, 1] - c[1])
        return [(0.0, 1.0)] if d < r else []
    t0s, t1s = path.segment_params()
    raw: list[tuple[float, float]] = []
    for k in range(len(W) - 1):
        a, b = W[k], W[k + 1]
        if t1s[k] == t0s[k]:
            continue
        if (
            float(point_segment_distances(np.array(c), a, b)) >= r
        ):
            continue
        da = math.hypot(a[0] - c[0], a[1] - c[1])
        db = math.hypot(b[0] - c[0], b[1] - c[1])
        roots = segment_circle_crossings(a, b, c, r)
        lo = 0.0 if da < r else (roots[0] if roots else 0.0)
        hi = 1.0 if db < r else (roots[-1] if roots else 1.0)
        if hi <= lo:
            continue
        span = t1s[k] - t0s[k]
        raw.append((t0s[k] + lo * span, t0s[k] + hi * span))
    merged: list[tuple[float, float]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + 1e-15:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return [(float(lo), float(min(hi, 1.0))) for lo, hi in merged]


def last_circle_crossing(path: PolyPath, center, r: float) -> float | None:
    """Largest parameter with ``|path(t) - center| == r``, or None."""
    W = path.waypoints
    if len(W) == 1 or path.length == 0.0:
        return None
    t0s, t1s = path.segment_params()
    for k in range(len(W) - 2, -1, -1):
        if t1s[k] == t0s[k]:
            continue
        roots = segment_circle_crossings(W[k], W[k + 1], center, r)
        if roots:
            return float(t0s[k] + roots[-1] * (t1s[k] - t0s[k]))
    return None


def subpath_from(path: PolyPath, t: float) -> PolyPath:
    """The part of ``path`` on ``[t, 1]``, re-parameterized to [0, 1]."""
    if t <= 0.0:
        return PolyPath(path.waypoints.copy())
    if t >= 1.0:
        return PolyPath(path.waypoints[-1:].copy())
    k, u = path.locate(t)
    p = np.asarray(path.point_at(t))
    rest = path.waypoints[k + 1 :]
    if u >= 1.0 or np.allclose(p, rest[0], rtol=0.0, atol=0.0):
        return PolyPath(rest.copy())
    return PolyPath(np.vstack([p, rest]))
