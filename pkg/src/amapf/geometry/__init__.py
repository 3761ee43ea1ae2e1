"""Planar geometry for the planner and its checks."""

from .paths import (
    PolyPath,
    concat,
    last_circle_crossing,
    path_blocking_intervals,
    path_min_dist_many,
    path_point_min_dist,
    subpath_from,
)
from .primitives import (
    CLEARANCE_TOL,
    EPS,
    as_polygon,
    dist,
    dist_point_segment,
    is_convex,
    is_simple,
    point_segment_distances,
    points_in_polygon,
    points_polygon_distance,
    polygon_signed_area,
    segment_circle_crossings,
    segments_polygon_distance,
)
from .regions import (
    DEFAULT_ARC_SEGMENTS,
    ConvexPart,
    InflatedRegion,
    disk_region,
    inflate_polygon,
    wall_polygons,
)
from .visibility import (
    RegionGraph,
    VisibilityGraph,
    build_visibility_graph,
    segments_blocked,
    shortest_path,
)
