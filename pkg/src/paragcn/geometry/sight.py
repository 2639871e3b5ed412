"""Line-of-sight graphs over boxes, kept for the graph-type ablation.

Visibility is approximated by sampled boundary points: two boxes see each
other when at least one sampled segment between their boundaries touches
no third box.  Quadratic in the number of boxes; meant for small pages.
"""
from __future__ import annotations

import numpy as np

from .graph import PageGraph
from .polygon import ensure_ccw
from .quad import as_quads
from .skeleton import SkeletonConfig, _check_pathological, _mark_internal, sample_box_points


def _orient(a, b, c):
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))


def segments_hit_quads(p: np.ndarray, q: np.ndarray, quads: np.ndarray) -> np.ndarray:
    """(S, K) closed intersection test of segments p->q with convex quads."""
    if len(quads) == 0 or len(p) == 0:
        return np.zeros((len(p), len(quads)), dtype=bool)
    quads = np.array([ensure_ccw(x) for x in quads])
    P = p[:, None, None, :]
    Q = q[:, None, None, :]
    A = quads[None, :, :, :]
    B = np.roll(quads, -1, axis=1)[None, :, :, :]
    p_in = np.all(_orient(A, B, P) >= 0, axis=2)
    q_in = np.all(_orient(A, B, Q) >= 0, axis=2)
    o1, o2 = _orient(P, Q, A), _orient(P, Q, B)
    o3, o4 = _orient(A, B, P), _orient(A, B, Q)
    cross = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    collinear = (o1 == 0) & (o2 == 0)
    if np.any(collinear):
        # collinear pieces only touch when their projections overlap
        d = Q - P
        tp = lambda X: np.sum((X - P) * d, axis=-1)  # noqa: E731
        ta, tb = tp(A), tp(B)
        dd = np.sum(d * d, axis=-1)
        overlap = (np.maximum(ta, tb) >= 0) & (np.minimum(ta, tb) <= dd)
        cross = np.where(collinear, overlap, cross)
    return p_in | q_in | np.any(cross, axis=2)


def _interval(quad: np.ndarray, value: float, axis: int) -> tuple[float, float] | None:
    """Extent of ``quad`` along the other axis on the line coord[axis] = value."""
    other = 1 - axis
    hits = []
    for k in range(4):
        a, b = quad[k], quad[(k + 1) % 4]
        lo, hi = min(a[axis], b[axis]), max(a[axis], b[axis])
        if value < lo or value > hi:
            continue
        if a[axis] == b[axis]:
            hits += [a[other], b[other]]
        else:
            t = (value - a[axis]) / (b[axis] - a[axis])
            hits.append(a[other] + t * (b[other] - a[other]))
    if not hits:
        return None
    return min(hits), max(hits)


def _axis_segments(qa: np.ndarray, qb: np.ndarray, spacing: float):
    """Axis-parallel segments joining facing sides of two boxes."""
    segs = []
    for axis in (0, 1):
        lo = max(qa[:, axis].min(), qb[:, axis].min())
        hi = min(qa[:, axis].max(), qb[:, axis].max())
        if lo > hi:
            continue
        k = max(1, int(np.ceil((hi - lo) / spacing)))
        for v in np.linspace(lo, hi, k + 1):
            ia, ib = _interval(qa, v, axis), _interval(qb, v, axis)
            if ia is None or ib is None:
                continue
            if ia[1] <= ib[0]:
                s, t = ia[1], ib[0]
            elif ib[1] <= ia[0]:
                s, t = ia[0], ib[1]
            else:
                continue
            p = np.empty(2)
            r = np.empty(2)
            p[axis] = r[axis] = v
            p[1 - axis], r[1 - axis] = s, t
            segs.append((p, r))
    return segs


def line_of_sight_graph(boxes, mode: str = "free",
                        config: SkeletonConfig = SkeletonConfig()) -> PageGraph:
    if mode not in ("free", "axis_aligned"):
        raise ValueError(f"mode: expected 'free' or 'axis_aligned', got {mode!r}")
    quads = as_quads(boxes)
    n = len(quads)
    if n == 0:
        raise ValueError("line_of_sight_graph needs at least one box")
    if n == 1:
        return PageGraph(1, np.zeros((0, 2), np.int64), np.zeros(0))
    _check_pathological(quads)
    samples = sample_box_points(quads, config)
    overlap = _mark_internal(quads, samples)
    per = [samples.points[(samples.owner == i) & ~samples.midline] for i in range(n)]
    lo, hi = quads.min(axis=1), quads.max(axis=1)

    pairs: list[tuple[int, int]] = sorted(overlap)
    lengths: list[float] = [0.0] * len(pairs)
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in overlap:
                continue
            if mode == "free":
                a = np.repeat(per[i], len(per[j]), axis=0)
                b = np.tile(per[j], (len(per[i]), 1))
            else:
                segs = _axis_segments(quads[i], quads[j], samples.spacing)
                if not segs:
                    continue
                a = np.array([s for s, _ in segs])
                b = np.array([t for _, t in segs])
            box_lo = np.minimum(lo[i], lo[j])
            box_hi = np.maximum(hi[i], hi[j])
            others = [k for k in range(n) if k not in (i, j)
                      and np.all(hi[k] >= box_lo) and np.all(lo[k] <= box_hi)]
            free = ~segments_hit_quads(a, b, quads[others]).any(axis=1) if others \
                else np.ones(len(a), dtype=bool)
            if free.any():
                pairs.append((i, j))
                lengths.append(float(np.linalg.norm(a[free] - b[free], axis=1).min()))
    return PageGraph.from_pairs(n, pairs, lengths)
