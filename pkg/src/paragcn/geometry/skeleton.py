"""β-skeleton (β = 1, Gabriel) graphs on points and on oriented boxes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .delaunay import _as_points, delaunay_triangulate
from .graph import PageGraph
from .polygon import clip_convex, ensure_ccw, point_in_convex, polygon_area
from .predicates import diametral_many
from .quad import as_quads, quad_heights


class PathologicalInputError(ValueError):
    """Every box overlaps one common point; the construction would be quadratic."""


@dataclass(frozen=True)
class SkeletonConfig:
    beta: float = 1.0
    peripheral_density: float = 2.0   # points per median box height
    midline_density: float = 2.0

    def __post_init__(self):
        if self.beta != 1.0:
            raise ValueError("beta: only beta = 1.0 is supported")
        if self.peripheral_density <= 0:
            raise ValueError("peripheral_density must be > 0")
        if self.midline_density <= 0:
            raise ValueError("midline_density must be > 0")


def gabriel_blocked(pts: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Delaunay edges whose open diametral disk holds an adjacent apex.

    For a Delaunay edge, some point lies strictly inside its diametral disk
    iff the apex of one of its (at most two) incident triangles does.
    """
    if len(triangles) == 0:
        return np.zeros((0, 2), np.int64)
    t = triangles
    a = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
    b = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
    c = np.concatenate([t[:, 2], t[:, 0], t[:, 1]])
    inside = diametral_many(pts[a], pts[b], pts[c]) < 0
    return np.stack([np.minimum(a, b)[inside], np.maximum(a, b)[inside]], axis=1)


def _is_blocked(edges: np.ndarray, blocked: np.ndarray) -> np.ndarray:
    if len(blocked) == 0 or len(edges) == 0:
        return np.zeros(len(edges), dtype=bool)
    n = int(max(edges.max(), blocked.max())) + 1
    return np.isin(edges[:, 0] * n + edges[:, 1], blocked[:, 0] * n + blocked[:, 1])


def beta_skeleton_points(points, graph: PageGraph | None = None) -> PageGraph:
    """Gabriel graph: Delaunay edges whose open diametral disk is empty."""
    pts = _as_points(points)
    if graph is None or graph.triangles is None:
        graph = delaunay_triangulate(pts)
    keep = ~_is_blocked(graph.edges, gabriel_blocked(pts, graph.triangles))
    return PageGraph(graph.node_count, graph.edges[keep], graph.lengths[keep])


@dataclass
class BoxSamples:
    points: np.ndarray      # (P, 2)
    owner: np.ndarray       # (P,) box index
    midline: np.ndarray     # (P,) True for longitudinal middle-line points
    internal: np.ndarray    # (P,) True if inside any box (own box for midline)
    spacing: float


def sample_spacing(quads: np.ndarray, density: float) -> float:
    h = float(np.median(quad_heights(quads)))
    if not h > 0:
        h = float(np.max(np.ptp(quads.reshape(-1, 2), axis=0))) or 1.0
    return h / density


def sample_box_points(quads: np.ndarray, config: SkeletonConfig = SkeletonConfig()) -> BoxSamples:
    """Peripheral points around every box and points along its middle line.

    Corners are always included; each side is subdivided evenly with at
    most one spacing between samples, opposite sides using different
    counts.  Middle-line points exclude the two
    end points (which lie on the boundary) and always include the center.
    """
    quads = as_quads(quads)
    per_sp = sample_spacing(quads, config.peripheral_density)
    mid_sp = sample_spacing(quads, config.midline_density)
    pts, owner, mid = [], [], []
    for i, q in enumerate(quads):
        base = [max(1, int(np.ceil(np.linalg.norm(q[s + 1] - q[s]) / per_sp))) for s in (0, 1)]
        # opposite sides get one extra subdivision so their samples never
        # pair up into cocircular rectangles
        counts = (base[0], base[1], base[0] + 1, base[1] + 1)
        for s, k in enumerate(counts):
            a, b = q[s], q[(s + 1) % 4]
            t = np.arange(k)[:, None] / k
            pts.append(a + t * (b - a))
            owner.append(np.full(k, i))
            mid.append(np.zeros(k, dtype=bool))
        left = 0.5 * (q[0] + q[3])
        right = 0.5 * (q[1] + q[2])
        k = max(2, int(np.ceil(np.linalg.norm(right - left) / mid_sp))) + 1
        t = np.arange(1, k)[:, None] / k
        pts.append(left + t * (right - left))
        owner.append(np.full(k - 1, i))
        mid.append(np.ones(k - 1, dtype=bool))
    points = np.concatenate(pts)
    owner_arr = np.concatenate(owner).astype(np.int64)
    mid_arr = np.concatenate(mid)
    return BoxSamples(points, owner_arr, mid_arr, mid_arr.copy(), per_sp)


def _mark_internal(quads: np.ndarray, s: BoxSamples) -> set[tuple[int, int]]:
    """Flag points lying in another box; return the overlapping box pairs."""
    lo = quads.min(axis=1)
    hi = quads.max(axis=1)
    order = np.argsort(s.points[:, 0], kind="stable")
    xs = s.points[order, 0]
    pairs: set[tuple[int, int]] = set()
    for b in range(len(quads)):
        i0, i1 = np.searchsorted(xs, lo[b, 0], "left"), np.searchsorted(xs, hi[b, 0], "right")
        cand = order[i0:i1]
        cand = cand[(s.points[cand, 1] >= lo[b, 1]) & (s.points[cand, 1] <= hi[b, 1])
                    & (s.owner[cand] != b)]
        if len(cand) == 0:
            continue
        inside = cand[point_in_convex(quads[b], s.points[cand])]
        if len(inside) == 0:
            continue
        s.internal[inside] = True
        for o in np.unique(s.owner[inside[~s.midline[inside]]]).tolist():
            pairs.add((min(o, b), max(o, b)))
    return pairs


def _check_pathological(quads: np.ndarray) -> None:
    if len(quads) < 3:
        return
    common = ensure_ccw(quads[0])
    for q in quads[1:]:
        common = clip_convex(common, ensure_ccw(q))
        if len(common) == 0:
            return
    if len(common) and (len(common) < 3 or polygon_area(common) >= 0):
        raise PathologicalInputError(
            f"all {len(quads)} boxes overlap a common point; refusing the O(n^2) case")


def beta_skeleton_boxes(boxes, config: SkeletonConfig = SkeletonConfig(),
                        page_size: tuple[float, float] | None = None,
                        return_samples: bool = False):
    """β-skeleton over boxes.

    Overlapping boxes get a zero-length edge.  Otherwise two boxes are
    joined when some pair of their non-internal sample points forms a
    Gabriel edge, and the shortest such edge gives the box edge length.
    """
    quads = as_quads(boxes)
    n = len(quads)
    if n == 0:
        raise ValueError("beta_skeleton_boxes needs at least one box")
    if page_size is not None:
        diag = float(np.hypot(*page_size))
        span = np.max(np.linalg.norm(quads[:, :, None, :] - quads[:, None, :, :], axis=-1), axis=(1, 2))
        if np.any(span > diag):
            raise ValueError(f"box {int(np.argmax(span))} is larger than the page diagonal")
    if n == 1:
        g = PageGraph(1, np.zeros((0, 2), np.int64), np.zeros(0))
        return (g, sample_box_points(quads, config)) if return_samples else g
    _check_pathological(quads)

    samples = sample_box_points(quads, config)
    overlap = _mark_internal(quads, samples)
    pts = samples.points
    dt = delaunay_triangulate(pts, break_ties=False)
    blocked = gabriel_blocked(pts, dt.triangles)

    e, ln = dt.edges, dt.lengths
    own = samples.owner
    ok = (~samples.internal[e[:, 0]]) & (~samples.internal[e[:, 1]]) & (own[e[:, 0]] != own[e[:, 1]])
    ok &= ~_is_blocked(e, blocked)
    pairs = list(zip(own[e[ok, 0]].tolist(), own[e[ok, 1]].tolist()))
    lengths = ln[ok].tolist()
    pairs += sorted(overlap)
    lengths += [0.0] * len(overlap)
    g = PageGraph.from_pairs(n, pairs, lengths)
    return (g, samples) if return_samples else g
