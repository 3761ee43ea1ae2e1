"""Configuration space: inflated obstacles plus the disks of delivered agents."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import (
    DEFAULT_ARC_SEGMENTS,
    InflatedRegion,
    RegionGraph,
    VisibilityGraph,
    build_visibility_graph,
    disk_region,
    inflate_polygon,
    point_segment_distances,
    segments_polygon_distance,
    wall_polygons,
)

AGENT_RADIUS = 1.0
BLOCKED_GOAL_RADIUS = 2.0


@dataclass(frozen=True, eq=False)
class CSpaceMap:
    obstacle_sources: tuple[np.ndarray, ...]
    blocked_goals: tuple[tuple[float, float], ...]
    arc_segments: int
    regions: tuple[InflatedRegion, ...]
    base: RegionGraph
    _graphs: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        obstacles: Sequence,
        bounds=None,
        arc_segments: int = DEFAULT_ARC_SEGMENTS,
        blocked_goals: Sequence = (),
    ) -> "CSpaceMap":
        sources = [np.asarray(p, dtype=float) for p in obstacles]
        if bounds is not None:
            sources += wall_polygons(bounds)
        regions = [inflate_polygon(p, AGENT_RADIUS, arc_segments) for p in sources]
        regions += [disk_region(g, BLOCKED_GOAL_RADIUS, arc_segments) for g in blocked_goals]
        return cls(
            obstacle_sources=tuple(sources),
            blocked_goals=tuple((float(g[0]), float(g[1])) for g in blocked_goals),
            arc_segments=arc_segments,
            regions=tuple(regions),
            base=RegionGraph().extend(regions),
        )

    def with_blocked_goal(self, goal) -> "CSpaceMap":
        """New map with the radius-2 disk around ``goal`` removed from free space."""
        region = disk_region(goal, BLOCKED_GOAL_RADIUS, self.arc_segments)
        return CSpaceMap(
            obstacle_sources=self.obstacle_sources,
            blocked_goals=self.blocked_goals + ((float(goal[0]), float(goal[1])),),
            arc_segments=self.arc_segments,
            regions=self.regions + (region,),
            base=self.base.extend([region]),
        )

    def refined(self, arc_segments: int) -> "CSpaceMap":
        m = CSpaceMap.build(self.obstacle_sources, None, arc_segments, self.blocked_goals)
        return m

    def graph(self, terminals) -> VisibilityGraph:
        T = np.asarray(terminals, dtype=float).reshape(-1, 2)
        key = T.tobytes()
        vg = self._graphs.get(key)
        if vg is None:
            vg = build_visibility_graph(self.regions, T, base=self.base)
            self._graphs.clear()
            self._graphs[key] = vg
        return vg

    def segment_clearance(self, a, b) -> float:
        """Exact clearance margin of ``[a, b]``: min over sources of distance minus required radius."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        worst = np.inf
        for src in self.obstacle_sources:
            worst = min(worst, float(segments_polygon_distance(a, b, src)[0]) - AGENT_RADIUS)
        if self.blocked_goals:
            G = np.asarray(self.blocked_goals)
            d = point_segment_distances(G, a[None, :], b[None, :])
            worst = min(worst, float(d.min()) - BLOCKED_GOAL_RADIUS)
        return worst
