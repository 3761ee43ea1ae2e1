"""Goal assignment minimizing the total geodesic length."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cspace import CSpaceMap
from .errors import InfeasibleAssignment
from .geometry import PolyPath, VisibilityGraph


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Geodesic lengths ``entries[i, j]`` from start i to goal j (``inf`` when unreachable).

    When built from a visibility graph the matrix can also hand back the
    underlying shortest paths.
    """

    entries: np.ndarray
    graph: VisibilityGraph | None = None
    source_nodes: tuple[int, ...] = ()
    target_nodes: tuple[int, ...] = ()
    predecessors: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def path(self, i: int, j: int) -> PolyPath | None:
        if self.graph is None or self.predecessors is None:
            raise ValueError("cost matrix carries no paths")
        return self.graph.path_from(self.predecessors[i], self.source_nodes[i], self.target_nodes[j])


@dataclass(frozen=True)
class Assignment:
    perm: tuple[int, ...]
    total_cost: float


def build_cost_matrix(starts: Sequence, goals: Sequence, cspace: CSpaceMap) -> CostMatrix:
    S = np.asarray(starts, dtype=float).reshape(-1, 2)
    T = np.asarray(goals, dtype=float).reshape(-1, 2)
    vg = cspace.graph(np.concatenate([S, T]))
    src = tuple(vg.terminal_node(i) for i in range(len(S)))
    tgt = tuple(vg.terminal_node(len(S) + j) for j in range(len(T)))
    dist, pred = vg.dijkstra(src)
    dist = np.atleast_2d(dist)
    pred = np.atleast_2d(pred)
    return CostMatrix(
        entries=dist[:, list(tgt)].copy(),
        graph=vg,
        source_nodes=src,
        target_nodes=tgt,
        predecessors=pred,
    )


def _perfect_matching(allowed: np.ndarray) -> list[int] | None:
    """Row -> column perfect matching in a boolean bipartite graph (Kuhn)."""
    n = allowed.shape[0]
    adj = [list(np.flatnonzero(allowed[i])) for i in range(n)]
    owner = [-1] * n

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if owner[j] < 0 or augment(owner[j], seen):
                    owner[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    row = [0] * n
    for j, i in enumerate(owner):
        row[i] = j
    return row


def _potentials(cost: list[list[float]]) -> tuple[list[int], list[float], list[float]]:
    """Shortest-augmenting-path Hungarian method; returns row->col plus dual potentials."""
    n = len(cost)
    INF = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = cost[i0 - 1]
            delta = INF
            j1 = 0
            ui0 = u[i0]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = [0] * n
    for j in range(1, n + 1):
        assign[p[j] - 1] = j - 1
    return assign, u[1:], v[1:]


def _lexicographic_min(tight: np.ndarray, match: list[int]) -> list[int]:
    """Lexicographically smallest perfect matching inside ``tight``, starting from ``match``."""
    n = len(match)
    match = list(match)
    owner = [0] * n
    for i, j in enumerate(match):
        owner[j] = i
    adj = [list(np.flatnonzero(tight[i])) for i in range(n)]

    for i in range(n):
        for c in adj[i]:
            if c >= match[i]:
                break
            r = owner[c]
            if r < i:
                continue
            target = match[i]
            # re-home row r along an alternating path that ends in column `target`
            seen = [False] * n
            seen[c] = True
            trail: list[tuple[int, int]] = []

            def search(row):
                for col in adj[row]:
                    if seen[col] or owner[col] < i:
                        continue
                    if col == target:
                        trail.append((row, col))
                        return True
                    seen[col] = True
                    nxt = owner[col]
                    if nxt <= i:
                        continue
                    if search(nxt):
                        trail.append((row, col))
                        return True
                return False

            if search(r):
                for row, col in trail:
                    match[row] = col
                    owner[col] = row
                match[i] = c
                owner[c] = i
                break
    return match


def hungarian(costs) -> Assignment:
    """Minimum-cost perfect matching; ties go to the lexicographically smallest permutation.

    ``costs`` may be a :class:`CostMatrix` or a square array; ``inf`` marks
    forbidden pairs. Raises InfeasibleAssignment when no finite matching exists.
    """
    C = np.asarray(costs.entries if isinstance(costs, CostMatrix) else costs, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        raise ValueError("cost matrix must be square and non-empty")
    n = C.shape[0]
    finite = np.isfinite(C)
    if np.any(np.isnan(C)):
        raise ValueError("cost matrix contains NaN")
    if _perfect_matching(finite) is None:
        raise InfeasibleAssignment("every perfect matching uses an unreachable pair")
    scale = float(np.max(np.abs(C[finite]))) if finite.any() else 0.0
    big = 4.0 * n * (scale + 1.0)
    work = np.where(finite, C, big)
    assign, u, v = _potentials(work.tolist())
    reduced = work - np.asarray(u)[:, None] - np.asarray(v)[None, :]
    tol = 1e-9 * max(1.0, scale)
    tight = (reduced <= tol) & finite
    perm = _lexicographic_min(tight, assign)
    total = 0.0
    for i, j in enumerate(perm):
        total += float(C[i, j])
    return Assignment(perm=tuple(int(j) for j in perm), total_cost=total)
