"""Random instances that respect the separation and clearance constraints."""

from __future__ import annotations

import math

import numpy as np

from ..errors import GenerationExhausted
from ..geometry import points_polygon_distance
from ..planner import SQRT5, Instance

MAX_ATTEMPTS_PER_ITEM = 20_000
OBSTACLE_GAP = 2.5


def default_bounds(m: int, sep_min: float, n_obstacles: int = 0) -> tuple[float, float, float, float]:
    """Square box meeting the area >= 4 m sep_min^2 heuristic, padded for obstacles."""
    area = 4.0 * m * sep_min**2 + 40.0 * n_obstacles
    side = math.ceil(math.sqrt(area))
    return (0.0, 0.0, float(side), float(side))


def random_convex_polygon(rng: np.random.Generator, center, radius: float) -> np.ndarray:
    n = int(rng.integers(3, 9))
    while True:
        ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * math.pi]]))
        # every arc gap below pi keeps the center inside; 0.3 rad avoids slivers
        if gaps.max() < math.pi and gaps.min() > 0.3:
            break
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=1) * radius + np.asarray(center)
    return np.round(pts, 6)


def generate(
    m: int,
    n_obstacles: int,
    bounds,
    sep_min: float,
    seed: int,
) -> Instance:
    """Rejection-sample obstacles, then starts and goals, inside ``bounds``.

    Obstacles are random convex polygons kept ``OBSTACLE_GAP`` apart. Start
    and goal points keep pairwise distance >= ``sep_min`` and distance
    >= sqrt(5) from every obstacle. The instance itself is unbounded; the box
    is recorded in the metadata. Raises GenerationExhausted.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if sep_min < 2.0 * math.sqrt(3.0) - 1e-12:
        raise ValueError("sep_min below 2*sqrt(3) is not admissible")
    x0, y0, x1, y1 = map(float, bounds)
    if x1 <= x0 or y1 <= y0:
        raise ValueError("empty bounds")
    rng = np.random.default_rng(seed)

    obstacles: list[np.ndarray] = []
    discs: list[tuple[float, float, float]] = []
    for _ in range(n_obstacles):
        for _attempt in range(MAX_ATTEMPTS_PER_ITEM):
            rad = float(rng.uniform(0.6, 2.5))
            c = (float(rng.uniform(x0 + rad, x1 - rad)), float(rng.uniform(y0 + rad, y1 - rad)))
            if all(math.hypot(c[0] - d[0], c[1] - d[1]) >= rad + d[2] + OBSTACLE_GAP for d in discs):
                break
        else:
            raise GenerationExhausted(f"could not place obstacle {len(obstacles)}; bounds too small")
        discs.append((c[0], c[1], rad))
        obstacles.append(random_convex_polygon(rng, c, rad))

    points = np.zeros((0, 2))
    need = 2 * m
    misses = 0  # consecutive rejected candidates
    while len(points) < need:
        for p in np.round(rng.uniform((x0, y0), (x1, y1), size=(64, 2)), 9):
            if (len(points) and np.min(np.hypot(*(points - p).T)) < sep_min) or any(
                points_polygon_distance(p, o)[0] < SQRT5 for o in obstacles
            ):
                misses += 1
                if misses >= MAX_ATTEMPTS_PER_ITEM:
                    raise GenerationExhausted(
                        f"placed {len(points)} of {need} start/goal points; bounds too small for sep_min={sep_min}"
                    )
                continue
            misses = 0
            points = np.vstack([points, p])
            if len(points) == need:
                break

    meta = {
        "generator": "rejection",
        "seed": int(seed),
        "m": int(m),
        "n_obstacles": int(n_obstacles),
        "sep_min": float(sep_min),
        "bounds": [x0, y0, x1, y1],
    }
    return Instance(
        obstacles=[tuple(map(tuple, o.tolist())) for o in obstacles],
        starts=[tuple(p) for p in points[:m].tolist()],
        goals=[tuple(p) for p in points[m:].tolist()],
        bounds=None,
        metadata=meta,
    )


REGIME_SEED_BASE = 5000


def min_pairwise_separation(instance: Instance) -> float:
    P = np.asarray(instance.starts + instance.goals, dtype=float)
    D = np.hypot(P[:, None, 0] - P[None, :, 0], P[:, None, 1] - P[None, :, 1])
    D[np.diag_indices(len(P))] = np.inf
    return float(D.min())


def regime_instances(count: int = 100, seed_base: int = REGIME_SEED_BASE, m_range=(4, 20), max_obstacles: int = 5):
    """Instances whose realized minimum separation lies strictly between 2*sqrt(3) and 4.

    Each draws m, the obstacle count and sep_min uniformly (sep_min from
    [2 sqrt 3 + 0.01, 4 - 0.01]) and uses the smallest heuristic box.
    Draws whose realized minimum reaches 4 are skipped.
    """
    lo, hi = 2.0 * math.sqrt(3.0) + 0.01, 4.0 - 0.01
    out = []
    seed = 0
    while len(out) < count:
        rng = np.random.default_rng(seed_base + seed)
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        k = int(rng.integers(0, max_obstacles + 1))
        sep = float(rng.uniform(lo, hi))
        inst = generate(m, k, default_bounds(m, sep, k), sep, seed)
        seed += 1
        if 2.0 * math.sqrt(3.0) < min_pairwise_separation(inst) < 4.0:
            out.append(inst)
    return out
