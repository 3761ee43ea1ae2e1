"""Visibility graphs over convex configuration-space obstacles.

Only *tangent* edges are kept: an edge ending at an obstacle vertex must
support that vertex's polygon locally. Shortest paths only ever bend at such
vertices, so the restricted graph yields exactly the same geodesics as the
full visibility graph while having O(regions^2) instead of O(vertices^2)
edges. The region part of the graph can be extended incrementally when new
regions appear; terminal edges are recomputed per query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ..errors import TerminalInsideObstacle
from .paths import PolyPath
from .primitives import EPS, point_segment_distances
from .regions import ConvexPart, InflatedRegion


def segments_blocked(A: np.ndarray, B: np.ndarray, parts: Sequence[ConvexPart], margin: float = EPS) -> np.ndarray:
    """For each segment ``[A_k, B_k]``, whether its open interior enters any part.

    A segment counts as entering a part when a sub-segment of positive length
    lies deeper than ``margin`` inside it; touching or sliding along the
    boundary is allowed.
    """
    A = np.asarray(A, dtype=float).reshape(-1, 2)
    B = np.asarray(B, dtype=float).reshape(-1, 2)
    blocked = np.zeros(len(A), dtype=bool)
    if len(A) == 0:
        return blocked
    lo_box = np.minimum(A, B)
    hi_box = np.maximum(A, B)
    for part in parts:
        live = np.flatnonzero(~blocked)
        if live.size == 0:
            break
        c, R = part.center, part.r_out
        box = (
            (lo_box[live, 0] < c[0] + R)
            & (hi_box[live, 0] > c[0] - R)
            & (lo_box[live, 1] < c[1] + R)
            & (hi_box[live, 1] > c[1] - R)
        )
        live = live[box]
        if live.size == 0:
            continue
        dc = point_segment_distances(c, A[live], B[live])
        near = dc < R
        sure = dc < part.r_in - margin
        blocked[live[sure]] = True
        amb = live[near & ~sure]
        if amb.size == 0:
            continue
        blocked[amb] = _clip_enters(A[amb], B[amb], part, margin)
    return blocked


def _clip_enters(A, B, part: ConvexPart, margin: float) -> np.ndarray:
    n, c = part.normals, part.offsets
    num = (c - margin)[None, :] - A @ n.T
    den = (B - A) @ n.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / den
    t_lo = np.max(np.where(den < 0, ratio, 0.0), axis=1, initial=0.0)
    t_hi = np.min(np.where(den > 0, ratio, 1.0), axis=1, initial=1.0)
    parallel_out = np.any((den == 0) & (num <= 0), axis=1)
    return (t_hi - t_lo > 1e-12) & ~parallel_out


def _tangent_at(V, P, N, W) -> np.ndarray:
    """Segment from polygon vertex ``V`` (neighbours ``P``, ``N``) toward ``W`` supports the polygon at ``V``."""
    d = W - V
    vp = P - V
    vn = N - V
    s1 = d[..., 0] * vp[..., 1] - d[..., 1] * vp[..., 0]
    s2 = d[..., 0] * vn[..., 1] - d[..., 1] * vn[..., 0]
    dl = np.hypot(d[..., 0], d[..., 1])
    t1 = 1e-12 * dl * np.hypot(vp[..., 0], vp[..., 1])
    t2 = 1e-12 * dl * np.hypot(vn[..., 0], vn[..., 1])
    crossing = ((s1 < -t1) & (s2 > t2)) | ((s1 > t1) & (s2 < -t2))
    return ~crossing & (dl > 0)


@dataclass(frozen=True, eq=False)
class RegionGraph:
    """Tangent visibility among region vertices; immutable, extend() returns a new graph."""

    regions: tuple[InflatedRegion, ...] = ()
    parts: tuple[ConvexPart, ...] = ()
    nodes: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    prev: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    next: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    buried: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))

    def extend(self, regions: Iterable[InflatedRegion]) -> "RegionGraph":
        new_regions = tuple(regions)
        if not new_regions:
            return self
        new_parts = tuple(p for r in new_regions for p in r.parts)
        all_parts = self.parts + new_parts

        nv, pv, qv = [], [], []
        for part in new_parts:
            V = part.vertices
            nv.append(V)
            pv.append(np.roll(V, 1, axis=0))
            qv.append(np.roll(V, -1, axis=0))
        new_nodes = np.concatenate(nv)
        new_prev = np.concatenate(pv)
        new_next = np.concatenate(qv)
        n_old = len(self.nodes)

        old_buried = self.buried.copy()
        for part in new_parts:
            if n_old:
                old_buried |= part.depth(self.nodes) > EPS
        new_buried = np.zeros(len(new_nodes), dtype=bool)
        for part in all_parts:
            new_buried |= part.depth(new_nodes) > EPS

        edges = self.edges
        if len(edges):
            cut = segments_blocked(self.nodes[edges[:, 0]], self.nodes[edges[:, 1]], new_parts)
            edges = edges[~cut]

        nodes = np.concatenate([self.nodes, new_nodes])
        prev = np.concatenate([self.prev, new_prev])
        nxt = np.concatenate([self.next, new_next])
        buried = np.concatenate([old_buried, new_buried])

        cand = []
        new_idx = n_old + np.flatnonzero(~new_buried)
        old_idx = np.flatnonzero(~old_buried)
        if new_idx.size and old_idx.size:
            cand.append(_tangent_pairs(nodes, prev, nxt, new_idx, old_idx))
        if new_idx.size > 1:
            pairs = _tangent_pairs(nodes, prev, nxt, new_idx, new_idx)
            cand.append(pairs[pairs[:, 0] < pairs[:, 1]])
        if cand:
            c = np.concatenate(cand)
            if len(c):
                ok = ~segments_blocked(nodes[c[:, 0]], nodes[c[:, 1]], all_parts)
                c = np.sort(c[ok], axis=1)
                edges = np.concatenate([edges, c])
        return RegionGraph(
            regions=self.regions + new_regions,
            parts=all_parts,
            nodes=nodes,
            prev=prev,
            next=nxt,
            buried=buried,
            edges=edges,
        )


def _tangent_pairs(nodes, prev, nxt, I, J) -> np.ndarray:
    Vi, Pi, Ni = nodes[I][:, None], prev[I][:, None], nxt[I][:, None]
    Vj, Pj, Nj = nodes[J][None, :], prev[J][None, :], nxt[J][None, :]
    ok = _tangent_at(Vi, Pi, Ni, Vj) & _tangent_at(Vj, Pj, Nj, Vi)
    ii, jj = np.nonzero(ok)
    return np.stack([I[ii], J[jj]], axis=1)


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    """Region vertices (first ``n_region_nodes`` rows of ``nodes``) plus terminals."""

    nodes: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    n_region_nodes: int
    parts: tuple[ConvexPart, ...] = ()

    @property
    def terminals(self) -> np.ndarray:
        return self.nodes[self.n_region_nodes :]

    def terminal_node(self, k: int) -> int:
        return self.n_region_nodes + k

    def node_index(self, p) -> int:
        p = np.asarray(p, dtype=float)
        T = self.terminals
        hit = np.flatnonzero(np.all(np.abs(T - p) <= 1e-12, axis=1))
        if hit.size:
            return self.n_region_nodes + int(hit[0])
        hit = np.flatnonzero(np.all(np.abs(self.nodes - p) <= 1e-12, axis=1))
        if hit.size:
            return int(hit[0])
        raise KeyError(f"{tuple(p)} is not a node of the visibility graph")

    @cached_property
    def adjacency(self) -> csr_matrix:
        n = len(self.nodes)
        if len(self.edges) == 0:
            return csr_matrix((n, n))
        i, j = self.edges[:, 0], self.edges[:, 1]
        # zero-weight edges would vanish from a sparse matrix
        w = np.maximum(self.weights, 1e-300)
        return csr_matrix((np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n))

    def has_edge(self, u: int, v: int) -> bool:
        a, b = min(u, v), max(u, v)
        return bool(np.any((self.edges[:, 0] == a) & (self.edges[:, 1] == b)))

    def dijkstra(self, sources: Sequence[int]):
        """Distances and predecessors from each source node."""
        return dijkstra(self.adjacency, directed=False, indices=list(sources), return_predecessors=True)

    def path_from(self, pred_row: np.ndarray, source: int, target: int) -> PolyPath | None:
        if source == target:
            return PolyPath(self.nodes[[source]])
        if pred_row[target] < 0:
            return None
        seq = [target]
        while seq[-1] != source:
            seq.append(int(pred_row[seq[-1]]))
        return PolyPath(self.nodes[seq[::-1]])


def build_visibility_graph(
    regions: Sequence[InflatedRegion],
    terminals,
    base: RegionGraph | None = None,
) -> VisibilityGraph:
    """Visibility graph over ``regions`` with ``terminals`` appended as extra nodes.

    ``base`` may carry a precomputed :class:`RegionGraph`; regions it does not
    already hold are added to it. Raises TerminalInsideObstacle when a
    terminal lies inside a region.
    """
    regions = tuple(regions)
    if base is None:
        base = RegionGraph().extend(regions)
    else:
        known = {id(r) for r in base.regions}
        missing = [r for r in regions if id(r) not in known]
        base = base.extend(missing)
    T = np.asarray(terminals, dtype=float).reshape(-1, 2)
    for part in base.parts:
        inside = np.flatnonzero(part.depth(T) > EPS) if len(T) else []
        if len(inside):
            raise TerminalInsideObstacle(int(inside[0]), T[inside[0]])

    n_r = len(base.nodes)
    nodes = np.concatenate([base.nodes, T]) if len(T) else base.nodes
    edge_sets = [base.edges]
    live = np.flatnonzero(~base.buried)
    if len(T) and live.size:
        V, P, N = base.nodes[live][None, :], base.prev[live][None, :], base.next[live][None, :]
        ok = _tangent_at(V, P, N, T[:, None, :])
        ti, vi = np.nonzero(ok)
        cand = np.stack([live[vi], n_r + ti], axis=1)
        if len(cand):
            vis = ~segments_blocked(nodes[cand[:, 0]], nodes[cand[:, 1]], base.parts)
            edge_sets.append(cand[vis])
    if len(T) > 1:
        ii, jj = np.triu_indices(len(T), k=1)
        cand = np.stack([n_r + ii, n_r + jj], axis=1)
        vis = ~segments_blocked(T[ii], T[jj], base.parts)
        edge_sets.append(cand[vis])
    edges = np.concatenate(edge_sets).astype(np.int64) if edge_sets else np.zeros((0, 2), dtype=np.int64)
    d = nodes[edges[:, 1]] - nodes[edges[:, 0]]
    weights = np.hypot(d[:, 0], d[:, 1])
    return VisibilityGraph(nodes=nodes, edges=edges, weights=weights, n_region_nodes=n_r, parts=base.parts)


def shortest_path(vg: VisibilityGraph, start, goal) -> PolyPath | None:
    """Shortest path between two graph nodes; None when they are disconnected."""
    s, g = vg.node_index(start), vg.node_index(goal)
    _, pred = vg.dijkstra([s])
    return vg.path_from(np.atleast_2d(pred)[0], s, g)
