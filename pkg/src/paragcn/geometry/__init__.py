from .delaunay import delaunay_triangulate
from .graph import PageGraph
from .polygon import (convex_hull, iou, point_in_convex, polygon_area,
                      polygon_intersection_area)
from .quad import Point, Quad, as_quads, quad_angles, quad_heights, quad_widths
from .sight import line_of_sight_graph
from .skeleton import (PathologicalInputError, SkeletonConfig, beta_skeleton_boxes,
                       beta_skeleton_points, sample_box_points)

__all__ = [
    "PageGraph", "PathologicalInputError", "Point", "Quad", "SkeletonConfig",
    "as_quads", "beta_skeleton_boxes", "beta_skeleton_points", "convex_hull",
    "delaunay_triangulate", "iou", "line_of_sight_graph", "point_in_convex",
    "polygon_area", "polygon_intersection_area", "quad_angles", "quad_heights",
    "quad_widths",
]
