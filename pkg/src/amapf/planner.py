"""Sequential planning loop for unit-disk agents with interchangeable goals.

Each iteration recomputes geodesics and an optimal assignment, picks a goal
whose disk is clear of every other assigned path, and delivers one agent to
it: either the assigned agent itself, or the last start position blocking
that agent's path, which cuts in with a short straight segment. The
delivered goal then becomes an obstacle for everybody else.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .assignment import Assignment, CostMatrix, build_cost_matrix, hungarian
from .cspace import BLOCKED_GOAL_RADIUS, CSpaceMap
from .errors import (
    ClassicAssumptionViolated,
    RerouteCrossesObstacle,
    SeparationViolation,
    StandaloneNotFound,
)
from .geometry import (
    CLEARANCE_TOL,
    EPS,
    PolyPath,
    concat,
    dist,
    last_circle_crossing,
    path_blocking_intervals,
    path_min_dist_many,
    points_polygon_distance,
    subpath_from,
    wall_polygons,
)

log = logging.getLogger(__name__)

SQRT3x2 = 2.0 * math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)
CLASSIC_SEPARATION = 4.0
BLOCK_RADIUS = 2.0  # two unit disks overlap iff their centers are closer than this

Point = tuple[float, float]


def _pt(p) -> Point:
    return (float(p[0]), float(p[1]))


@dataclass(frozen=True)
class Instance:
    obstacles: tuple[tuple[Point, ...], ...]
    starts: tuple[Point, ...]
    goals: tuple[Point, ...]
    bounds: tuple[float, float, float, float] | None = None
    metadata: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(tuple(_pt(v) for v in ring) for ring in self.obstacles))
        object.__setattr__(self, "starts", tuple(_pt(p) for p in self.starts))
        object.__setattr__(self, "goals", tuple(_pt(p) for p in self.goals))
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        if len(self.starts) != len(self.goals):
            raise ValueError("need as many goals as starts")
        if not self.starts:
            raise ValueError("need at least one agent")

    @property
    def m(self) -> int:
        return len(self.starts)

    def obstacle_polygons(self, include_walls: bool = True) -> list[np.ndarray]:
        polys = [np.asarray(o, dtype=float) for o in self.obstacles]
        if include_walls and self.bounds is not None:
            polys += wall_polygons(self.bounds)
        return polys


@dataclass(frozen=True)
class PlannerConfig:
    mode: str = "modified"
    separation_threshold: float | None = None
    arc_segments: int = 64
    refine_retries: int = 3
    eps: float = EPS

    def __post_init__(self):
        if self.mode not in ("modified", "classic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.separation_threshold is None:
            default = CLASSIC_SEPARATION if self.mode == "classic" else SQRT3x2
            object.__setattr__(self, "separation_threshold", default)
        thr = self.separation_threshold
        if self.mode == "classic" and abs(thr - CLASSIC_SEPARATION) > 1e-12:
            raise ValueError("classic mode requires separation threshold 4")
        if self.mode == "modified" and thr < SQRT3x2 - 1e-12:
            raise ValueError("modified mode requires separation threshold >= 2*sqrt(3)")
        if self.arc_segments < 8:
            raise ValueError("arc_segments must be at least 8")


@dataclass(frozen=True)
class SeparationReport:
    threshold: float
    pair_violations: tuple[tuple[str, int, str, int, float], ...]
    clearance_violations: tuple[tuple[str, int, float], ...]
    min_pairwise: float
    min_clearance: float

    @property
    def passed(self) -> bool:
        return not self.pair_violations and not self.clearance_violations

    def summary(self) -> str:
        return (
            f"{len(self.pair_violations)} pair(s) closer than {self.threshold:.6g}, "
            f"{len(self.clearance_violations)} point(s) closer than sqrt(5) to an obstacle"
        )


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    chosen_goal: int
    mover: int
    committed_agent: int
    branch: str  # "direct" | "6a" | "6b"
    blocker: int | None = None
    block_param: float | None = None
    reroute_param: float | None = None
    prefix_length: float | None = None
    suffix_straight: bool | None = None
    geodesic_length: float = 0.0
    committed_length: float = 0.0
    assignment_cost: float = 0.0
    arc_segments: int = 64
    refinements: int = 0


@dataclass(frozen=True, eq=False)
class Move:
    agent: int
    path: PolyPath


@dataclass(frozen=True, eq=False)
class PlanResult:
    moves: tuple[Move, ...]
    sum_of_costs: float
    initial_assignment_cost: float
    traces: tuple[IterationTrace, ...]
    config: PlannerConfig = field(default_factory=PlannerConfig)

    @property
    def branch_counts(self) -> dict[str, int]:
        counts = {"direct": 0, "6a": 0, "6b": 0}
        for tr in self.traces:
            counts[tr.branch] += 1
        return counts


def validate_separation(instance: Instance, threshold: float) -> SeparationReport:
    """Pairwise separation over starts and goals, and sqrt(5) clearance from obstacles."""
    labels = [("start", i) for i in range(instance.m)] + [("goal", j) for j in range(instance.m)]
    P = np.asarray(instance.starts + instance.goals, dtype=float)
    D = np.hypot(P[:, None, 0] - P[None, :, 0], P[:, None, 1] - P[None, :, 1])
    iu, ju = np.triu_indices(len(P), k=1)
    dd = D[iu, ju]
    bad = np.flatnonzero(dd < threshold - 1e-9)
    pairs = tuple(
        (labels[iu[k]][0], labels[iu[k]][1], labels[ju[k]][0], labels[ju[k]][1], float(dd[k])) for k in bad
    )
    clearance = np.full(len(P), np.inf)
    for poly in instance.obstacle_polygons():
        clearance = np.minimum(clearance, points_polygon_distance(P, poly))
    low = np.flatnonzero(clearance < SQRT5 - 1e-9)
    clear = tuple((labels[k][0], labels[k][1], float(clearance[k])) for k in low)
    return SeparationReport(
        threshold=float(threshold),
        pair_violations=pairs,
        clearance_violations=clear,
        min_pairwise=float(dd.min()) if len(dd) else math.inf,
        min_clearance=float(clearance.min()) if len(P) else math.inf,
    )


def find_standalone_goal(
    paths: Sequence[PolyPath], assignment: Assignment, goals: Sequence, eps: float = EPS
) -> int:
    """Smallest goal index whose unit disk is clear of every other agent's assigned path."""
    T = np.asarray(goals, dtype=float).reshape(-1, 2)
    m = len(T)
    D = np.stack([path_min_dist_many(p, T) for p in paths])  # agents x goals
    owner = np.empty(m, dtype=int)
    owner[list(assignment.perm)] = np.arange(m)
    D[owner, np.arange(m)] = np.inf
    ok = np.flatnonzero(D.min(axis=0) >= BLOCK_RADIUS - eps)
    if ok.size == 0:
        raise StandaloneNotFound("no goal is clear of all other assigned paths")
    return int(ok[0])


def find_last_blocker(path: PolyPath, mover: int, remaining_starts) -> tuple[int, float] | None:
    """Start position whose blocking interval along ``path`` reaches furthest, with that supremum."""
    best = None
    for agent, s in sorted(remaining_starts, key=lambda c: c[0]):
        if agent == mover:
            continue
        iv = path_blocking_intervals(path, s, BLOCK_RADIUS)
        if iv and (best is None or iv[-1][1] > best[1]):
            best = (agent, iv[-1][1])
    return best


def build_reroute(
    path: PolyPath,
    goal,
    blocker_start,
    t: float,
    cspace: CSpaceMap | None = None,
    eps: float = EPS,
) -> tuple[PolyPath, str]:
    """Path for a blocker cutting into ``path`` at parameter ``t`` (or at the radius-2 point before the goal)."""
    p = path.point_at(t)
    if dist(p, blocker_start) > BLOCK_RADIUS + 1e-6:
        raise ValueError("reroute parameter is not on the blocker's disk boundary")
    if dist(p, goal) >= BLOCK_RADIUS - eps:
        join, branch = t, "6a"
    else:
        tp = last_circle_crossing(path, goal, BLOCK_RADIUS)
        if tp is None:
            raise RerouteCrossesObstacle("path never crosses the radius-2 circle around its goal")
        join, branch = tp, "6b"
    q = path.point_at(join)
    if cspace is not None and cspace.segment_clearance(blocker_start, q) < -CLEARANCE_TOL:
        raise RerouteCrossesObstacle(
            f"segment {tuple(blocker_start)} -> {q} violates clearance by "
            f"{-cspace.segment_clearance(blocker_start, q):.3g}"
        )
    prefix = PolyPath.straight(blocker_start, q)
    return concat(prefix, subpath_from(path, join)), branch


def _is_straight(path: PolyPath, tol: float = 1e-9) -> bool:
    W = path.waypoints
    if len(W) <= 2:
        return True
    a, b = W[0], W[-1]
    d = b - a
    n = math.hypot(*d)
    if n == 0:
        return False
    off = np.abs((W[:, 0] - a[0]) * d[1] - (W[:, 1] - a[1]) * d[0]) / n
    return bool(np.all(off <= tol))


@dataclass
class _Iteration:
    costs: CostMatrix
    assignment: Assignment
    paths: list[PolyPath]
    goal: int
    arc_segments: int
    refinements: int


def _solve_iteration(cspace: CSpaceMap, S, T, config: PlannerConfig, need_standalone: bool = True) -> _Iteration:
    cs = cspace
    refinements = 0
    while True:
        costs = build_cost_matrix(S, T, cs)
        asg = hungarian(costs)
        paths = [costs.path(k, asg.perm[k]) for k in range(len(S))]
        if not need_standalone:
            return _Iteration(costs, asg, paths, -1, cs.arc_segments, refinements)
        try:
            g = find_standalone_goal(paths, asg, T, config.eps)
            return _Iteration(costs, asg, paths, g, cs.arc_segments, refinements)
        except StandaloneNotFound:
            if refinements >= config.refine_retries:
                raise
            refinements += 1
            log.info("no standalone goal at %d arc segments; refining", cs.arc_segments)
            cs = cspace.refined(cs.arc_segments * 2)


def plan(
    instance: Instance,
    config: PlannerConfig | None = None,
    *,
    first_move: tuple[int, int, PolyPath] | None = None,
) -> PlanResult:
    """Deliver every agent to a distinct goal, one agent in motion at a time.

    ``first_move = (agent, goal, path)`` replaces the first iteration's
    goal selection with a caller-supplied geodesic; blocking and rerouting
    still run on it. Used to replay hand-built configurations.

    Raises SeparationViolation, InfeasibleAssignment, StandaloneNotFound or
    ClassicAssumptionViolated; errors raised mid-run carry the traces
    collected so far in a ``traces`` attribute.
    """
    config = config or PlannerConfig()
    report = validate_separation(instance, config.separation_threshold)
    if not report.passed:
        raise SeparationViolation(report)

    cspace = CSpaceMap.build(instance.obstacles, instance.bounds, config.arc_segments)
    agents = list(range(instance.m))
    goals_left = list(range(instance.m))
    moves: list[Move] = []
    traces: list[IterationTrace] = []
    initial_cost = math.nan

    try:
        for it in range(instance.m):
            S = [instance.starts[a] for a in agents]
            T = [instance.goals[g] for g in goals_left]
            forced = it == 0 and first_move is not None
            step = _solve_iteration(cspace, S, T, config, need_standalone=not forced)
            if it == 0:
                initial_cost = step.assignment.total_cost
            if forced:
                agent, goal, gamma = first_move
                j, gl = agents.index(agent), goals_left.index(goal)
                if dist(gamma.start, S[j]) > EPS or dist(gamma.end, T[gl]) > EPS:
                    raise ValueError("first_move path must run from the agent's start to the goal")
            else:
                gl = step.goal
                j = step.assignment.perm.index(gl)
                gamma = step.paths[j]
            others = [(agents[k], S[k]) for k in range(len(agents)) if k != j]
            blk = find_last_blocker(gamma, agents[j], others)
            extra = {}
            if blk is None:
                committed, path, branch = agents[j], gamma, "direct"
            else:
                blocker, t = blk
                path, branch = build_reroute(
                    gamma, T[gl], instance.starts[blocker], t, cspace=cspace, eps=config.eps
                )
                if branch == "6b" and config.mode == "classic":
                    raise ClassicAssumptionViolated(
                        f"iteration {it}: last blocking point lies within 2 of the goal"
                    )
                committed = blocker
                extra = dict(
                    blocker=blocker,
                    block_param=t,
                    prefix_length=dist(instance.starts[blocker], path.waypoints[1]),
                )
                if branch == "6b":
                    tp = last_circle_crossing(gamma, T[gl], BLOCK_RADIUS)
                    straight = _is_straight(subpath_from(gamma, tp))
                    if not straight:
                        log.warning("iteration %d: geodesic suffix inside the goal circle is not straight", it)
                    extra.update(reroute_param=tp, suffix_straight=straight)
            moves.append(Move(committed, path))
            traces.append(
                IterationTrace(
                    iteration=it,
                    chosen_goal=goals_left[gl],
                    mover=agents[j],
                    committed_agent=committed,
                    branch=branch,
                    geodesic_length=gamma.length,
                    committed_length=path.length,
                    assignment_cost=step.assignment.total_cost,
                    arc_segments=step.arc_segments,
                    refinements=step.refinements,
                    **extra,
                )
            )
            agents.remove(committed)
            cspace = cspace.with_blocked_goal(T[gl])
            del goals_left[gl]
    except Exception as exc:
        exc.traces = list(traces)
        raise

    total = 0.0
    for mv in moves:
        total += mv.path.length
    return PlanResult(
        moves=tuple(moves),
        sum_of_costs=total,
        initial_assignment_cost=float(initial_cost),
        traces=tuple(traces),
        config=config,
    )
