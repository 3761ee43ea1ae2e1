"""Independent checks of plans, plus brute-force oracles.

Nothing here touches the planner's configuration-space approximation: plans
are checked against the exact obstacle polygons and exact agent positions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import (
    CLEARANCE_TOL,
    point_segment_distances,
    points_polygon_distance,
    segments_polygon_distance,
)
from .planner import Instance, PlanResult

AGENT_RADIUS = 1.0
CONTACT_DISTANCE = 2.0


@dataclass
class CheckReport:
    passed: bool
    endpoint_coverage: bool
    min_obstacle_clearance: float
    min_interagent_distance: float
    cost_bound_ok: bool
    violations: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "endpoint_coverage": self.endpoint_coverage,
            "min_obstacle_clearance": _num(self.min_obstacle_clearance),
            "min_interagent_distance": _num(self.min_interagent_distance),
            "cost_bound_ok": self.cost_bound_ok,
            "violations": self.violations,
        }


def _num(x: float):
    return x if math.isfinite(x) else None


def cost_bound_check(plan: PlanResult, m: int) -> bool:
    """Total length exceeds the first optimal assignment by at most 4 per agent."""
    return plan.sum_of_costs <= plan.initial_assignment_cost + 4.0 * m + 1e-6 * m


def check_solution(instance: Instance, plan: PlanResult, tol: float = CLEARANCE_TOL) -> CheckReport:
    violations: list[dict] = []
    m = instance.m
    S = np.asarray(instance.starts, dtype=float)
    T = np.asarray(instance.goals, dtype=float)

    # (a) each agent moves once from its own start; end points cover the goals
    coverage = len(plan.moves) == m
    if not coverage:
        violations.append({"kind": "move_count", "expected": m, "found": len(plan.moves)})
    seen_agents: set[int] = set()
    goal_used = np.zeros(m, dtype=bool)
    finals = []
    for k, mv in enumerate(plan.moves):
        W = mv.path.waypoints
        if not (0 <= mv.agent < m) or mv.agent in seen_agents:
            coverage = False
            violations.append({"kind": "bad_agent", "move": k, "agent": mv.agent})
            finals.append(W[-1])
            continue
        seen_agents.add(mv.agent)
        if np.hypot(*(W[0] - S[mv.agent])) > tol:
            coverage = False
            violations.append({"kind": "wrong_start", "move": k, "agent": mv.agent})
        d = np.hypot(*(T - W[-1]).T)
        d[goal_used] = np.inf
        g = int(np.argmin(d))
        if d[g] > tol:
            coverage = False
            violations.append({"kind": "missed_goal", "move": k, "agent": mv.agent, "end": W[-1].tolist()})
        else:
            goal_used[g] = True
        finals.append(W[-1])

    # (b) clearance from the exact obstacles
    min_clear = math.inf
    polys = instance.obstacle_polygons()
    for k, mv in enumerate(plan.moves):
        A, B = _segments(mv.path.waypoints)
        for oi, poly in enumerate(polys):
            d = float(segments_polygon_distance(A, B, poly).min())
            min_clear = min(min_clear, d)
            if d < AGENT_RADIUS - tol:
                violations.append(
                    {"kind": "obstacle", "move": k, "agent": mv.agent, "obstacle": oi, "distance": d}
                )

    # (c) one agent moves at a time; everybody else is a static disk
    min_inter = math.inf
    moved: list[int] = []
    for k, mv in enumerate(plan.moves):
        static = [("start", a, S[a]) for a in range(m) if a != mv.agent and a not in moved]
        static += [("goal_of", plan.moves[q].agent, finals[q]) for q in range(k)]
        moved.append(mv.agent)
        if not static:
            continue
        C = np.asarray([c for _, _, c in static])
        A, B = _segments(mv.path.waypoints)
        D = point_segment_distances(C[:, None, :], A[None, :, :], B[None, :, :]).min(axis=1)
        min_inter = min(min_inter, float(D.min()))
        for idx in np.flatnonzero(D < CONTACT_DISTANCE - tol):
            kind, who, _ = static[idx]
            violations.append(
                {
                    "kind": "interagent",
                    "move": k,
                    "agent": mv.agent,
                    "other": who,
                    "other_at": kind,
                    "distance": float(D[idx]),
                }
            )

    # (d) reported cost matches the paths
    total = 0.0
    for mv in plan.moves:
        total += mv.path.length
    if abs(total - plan.sum_of_costs) > tol:
        violations.append({"kind": "cost_mismatch", "reported": plan.sum_of_costs, "measured": total})

    bound_ok = cost_bound_check(plan, m)
    passed = coverage and bound_ok and not violations
    return CheckReport(
        passed=passed,
        endpoint_coverage=coverage,
        min_obstacle_clearance=min_clear,
        min_interagent_distance=min_inter,
        cost_bound_ok=bound_ok,
        violations=violations,
    )


def _segments(W: np.ndarray):
    if len(W) == 1:
        return W, W
    return W[:-1], W[1:]


def brute_force_assignment(costs) -> float:
    """Exhaustive minimum total cost over all permutations (inf if none is finite)."""
    C = np.asarray(getattr(costs, "entries", costs), dtype=float)
    n = C.shape[0]
    if n > 8:
        raise ValueError("brute force limited to 8x8")
    rows = C.tolist()
    best = math.inf
    for perm in itertools.permutations(range(n)):
        s = 0.0
        for i, j in enumerate(perm):
            s += rows[i][j]
        if s < best:
            best = s
    return best


class Unreachable(Exception):
    pass


def _grid_offsets(reach: int = 4) -> list[tuple[int, int]]:
    # primitive lattice directions in a half plane; the widest angular gap is
    # about 14 degrees, so grid distances overshoot straight lines by < 1%
    out = []
    for dx in range(0, reach + 1):
        for dy in range(-reach, reach + 1):
            if (dx, dy) == (0, 0) or math.gcd(dx, abs(dy)) != 1 or (dx == 0 and dy < 0):
                continue
            out.append((dx, dy))
    return out


_NEIGHBOURS = _grid_offsets()


def _shifted(n: int, d: int) -> tuple[slice, slice]:
    return (slice(0, n - d), slice(d, n)) if d >= 0 else (slice(-d, n), slice(0, n + d))


def _offset(sl: slice, o: int) -> slice:
    return slice(sl.start + o, sl.stop + o)


def grid_path_oracle(scene, start, goal, cell: float = 0.05, margin: float = 3.0) -> float:
    """Length of a feasible path for a unit disk found on a grid.

    Cells whose centers keep clearance >= 1 from every polygon of ``scene``
    are joined along every primitive lattice direction up to 4 cells long.
    The Dijkstra path is then shortened by jumping to the furthest later
    vertex reachable in a straight line with exact clearance >= 1. The result is a feasible path length and so an
    upper bound on the true geodesic. Raises Unreachable.
    """
    if cell <= 0:
        raise ValueError("cell must be positive")
    polys = [np.asarray(p, dtype=float) for p in scene]
    pts = np.vstack([np.asarray([start, goal], dtype=float)] + polys)
    lo = pts.min(axis=0) - margin
    hi = pts.max(axis=0) + margin
    nx = int(math.ceil((hi[0] - lo[0]) / cell)) + 1
    ny = int(math.ceil((hi[1] - lo[1]) / cell)) + 1
    xs = lo[0] + cell * np.arange(nx)
    ys = lo[1] + cell * np.arange(ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    P = np.stack([X.ravel(), Y.ravel()], axis=1)
    clear = np.full(len(P), np.inf)
    for poly in polys:
        c = poly.mean(axis=0)
        reach = np.hypot(*(poly - c).T).max() + AGENT_RADIUS + cell
        near = np.flatnonzero(np.hypot(P[:, 0] - c[0], P[:, 1] - c[1]) < reach)
        if near.size:
            clear[near] = np.minimum(clear[near], points_polygon_distance(P[near], poly))
    free = (clear >= AGENT_RADIUS).reshape(nx, ny)

    idx = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, wts = [], [], []
    for dx, dy in _NEIGHBOURS:
        xa, xb = _shifted(nx, dx)
        ya, yb = _shifted(ny, dy)
        both = free[xa, ya] & free[xb, yb]
        steps = max(abs(dx), abs(dy))
        for k in range(1, steps):  # lattice points the long edge passes near
            ox, oy = round(k * dx / steps), round(k * dy / steps)
            both &= free[_offset(xa, ox), _offset(ya, oy)]
        a = idx[xa, ya][both]
        b = idx[xb, yb][both]
        rows.append(a)
        cols.append(b)
        wts.append(np.full(a.size, cell * math.hypot(dx, dy)))
    n = nx * ny
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    w = np.concatenate(wts)
    G = coo_matrix((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n)).tocsr()

    def clear_segments(A, B):
        A = np.atleast_2d(A)
        B = np.atleast_2d(B)
        ok = np.ones(len(A), dtype=bool)
        for poly in polys:
            ok &= segments_polygon_distance(A, B, poly) >= AGENT_RADIUS - 1e-12
        return ok

    def attach(p):
        p = np.asarray(p, dtype=float)
        d = np.hypot(P[:, 0] - p[0], P[:, 1] - p[1])
        cand = np.flatnonzero(free.ravel() & (d <= 3 * cell))
        cand = cand[np.argsort(d[cand], kind="stable")]
        for q in cand:
            if clear_segments(p, P[q])[0]:
                return int(q)
        raise Unreachable(f"no free grid cell next to {tuple(p)}")

    s, g = attach(start), attach(goal)
    dist, pred = dijkstra(G, directed=False, indices=s, return_predecessors=True)
    if not np.isfinite(dist[g]):
        raise Unreachable("grid search found no path")
    seq = [g]
    while seq[-1] != s:
        seq.append(int(pred[seq[-1]]))
    route = np.vstack([np.asarray(start, dtype=float), P[seq[::-1]], np.asarray(goal, dtype=float)])

    # shortcut: from each kept vertex jump to the furthest visible later vertex
    length = 0.0
    i = 0
    last = len(route) - 1
    while i < last:
        later = np.arange(i + 1, last + 1)
        ok = clear_segments(np.repeat(route[i][None, :], len(later), axis=0), route[later])
        ok[0] = True
        j = int(later[np.flatnonzero(ok)[-1]])
        length += float(np.hypot(*(route[j] - route[i])))
        i = j
    return length
