"""Delaunay triangulation with exact-predicate certification.

Qhull (through scipy) produces the initial triangulation.  Every interior
edge is then re-checked with the exact in-circle predicate and repaired by
Lawson flips, so the result is a true Delaunay triangulation of the float
inputs.  Cocircular quadruples are resolved toward the diagonal holding
the lowest point index.  When Qhull drops points or emits degenerate
triangles, a pure-Python sweep triangulation is flipped instead.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .graph import PageGraph
from .predicates import incircle, incircle_many, orient2d, orient2d_many

log = logging.getLogger(__name__)


def _as_points(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        pts = points.astype(np.float64, copy=False)
    else:
        pts = np.array([(p.x, p.y) if hasattr(p, "x") else p for p in points], dtype=np.float64)
    pts = pts.reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


def _dedupe(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Representative indices (first occurrence) and rep-of-each-point."""
    first: dict[tuple[float, float], int] = {}
    rep = np.empty(len(pts), dtype=np.int64)
    for i, (x, y) in enumerate(pts.tolist()):
        rep[i] = first.setdefault((x, y), i)
    return np.array(sorted(first.values()), dtype=np.int64), rep


def _qhull_triangles(pts: np.ndarray) -> np.ndarray | None:
    try:
        tri = Delaunay(pts).simplices.astype(np.int64)
    except (QhullError, ValueError):
        return None
    if len(np.unique(tri)) != len(pts):
        return None
    sign = orient2d_many(pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]])
    if np.any(sign == 0):
        return None
    tri[sign < 0] = tri[sign < 0][:, [0, 2, 1]]
    return tri


def sweep_triangulation(pts: np.ndarray) -> np.ndarray:
    """Any valid triangulation by a lexicographic sweep (exact predicates).

    Requires at least three non-collinear, pairwise-distinct points.
    """
    order = sorted(range(len(pts)), key=lambda i: (pts[i, 0], pts[i, 1]))
    p = pts
    j = 2
    while j < len(order) and orient2d(p[order[0]], p[order[1]], p[order[j]]) == 0:
        j += 1
    if j == len(order):
        raise ValueError("all points are collinear")
    apex = order[j]
    chain = order[:j]
    tris = []
    for a, b in zip(chain, chain[1:]):
        tris.append((a, b, apex) if orient2d(p[a], p[b], p[apex]) > 0 else (b, a, apex))
    hull = chain + [apex]
    if orient2d(p[chain[0]], p[chain[-1]], p[apex]) < 0:
        hull = hull[::-1]
    for q in order[j + 1:]:
        nh = len(hull)
        vis = [orient2d(p[hull[i]], p[hull[(i + 1) % nh]], p[q]) < 0 for i in range(nh)]
        start = next(i for i in range(nh) if vis[i] and not vis[i - 1])
        rot = hull[start:] + hull[:start]
        run = 0
        while run < nh and vis[(start + run) % nh]:
            tris.append((rot[run], q, rot[run + 1] if run + 1 < nh else rot[0]))
            run += 1
        hull = [rot[0], q] + rot[run:]
    return np.array(tris, dtype=np.int64)


def _legalize(pts: np.ndarray, tris: np.ndarray, break_ties: bool = True) -> np.ndarray:
    """Lawson flips until every interior edge passes the exact in-circle test."""
    n = len(pts)
    a = np.concatenate([tris[:, 0], tris[:, 1], tris[:, 2]])
    b = np.concatenate([tris[:, 1], tris[:, 2], tris[:, 0]])
    c = np.concatenate([tris[:, 2], tris[:, 0], tris[:, 1]])
    key = a * n + b
    order = np.argsort(key)
    twin = np.searchsorted(key[order], b * n + a)
    twin = np.minimum(twin, len(key) - 1)
    has_twin = key[order][twin] == b * n + a
    sel = has_twin & (a < b)
    d = c[order][twin][sel]
    ea, eb, ec = a[sel], b[sel], c[sel]
    s = incircle_many(pts[ea], pts[eb], pts[ec], pts[d])
    flip = s > 0
    if break_ties:
        flip |= (s == 0) & (np.minimum(ec, d) < np.minimum(ea, eb))
    if not flip.any():
        return tris

    apex = dict(zip(zip(a.tolist(), b.tolist()), c.tolist()))
    stack = list(zip(ea[flip].tolist(), eb[flip].tolist()))
    pl = pts.tolist()
    tie_budget = 4 * len(tris) if break_ties else 0
    flips = 0
    while stack:
        a_, b_ = stack.pop()
        c_ = apex.get((a_, b_))
        d_ = apex.get((b_, a_))
        if c_ is None or d_ is None:
            continue
        sgn = incircle(pl[a_], pl[b_], pl[c_], pl[d_])
        if sgn < 0:
            continue
        if sgn == 0:
            if min(c_, d_) > min(a_, b_) or tie_budget <= 0:
                continue
            tie_budget -= 1
        for k in ((a_, b_), (b_, c_), (c_, a_), (b_, a_), (a_, d_), (d_, b_)):
            del apex[k]
        apex[(a_, d_)] = c_
        apex[(d_, c_)] = a_
        apex[(c_, a_)] = d_
        apex[(d_, b_)] = c_
        apex[(b_, c_)] = d_
        apex[(c_, d_)] = b_
        stack.extend([(a_, d_), (d_, b_), (b_, c_), (c_, a_)])
        flips += 1
    log.debug("legalized triangulation with %d flips", flips)
    out = np.array([(u, v, w) for (u, v), w in apex.items()], dtype=np.int64)
    # each triangle appears three times, once per rotation; keep min-first
    out = out[(out[:, 0] < out[:, 1]) & (out[:, 0] < out[:, 2])]
    return out[np.lexsort((out[:, 2], out[:, 1], out[:, 0]))]


def _triangulate_unique(pts: np.ndarray, break_ties: bool) -> tuple[np.ndarray, np.ndarray]:
    """Edges (and triangles, possibly empty) over pairwise-distinct points."""
    n = len(pts)
    if n < 2:
        return np.zeros((0, 2), np.int64), np.zeros((0, 3), np.int64)
    if n == 2:
        return np.array([[0, 1]]), np.zeros((0, 3), np.int64)
    far = int(np.argmax(np.sum((pts - pts[0]) ** 2, axis=1)))
    sign = orient2d_many(np.broadcast_to(pts[0], pts.shape), np.broadcast_to(pts[far], pts.shape), pts)
    if not np.any(sign):
        # collinear: a path in projection order
        proj = (pts - pts[0]) @ (pts[far] - pts[0])
        order = np.argsort(proj, kind="stable")
        return np.stack([order[:-1], order[1:]], axis=1), np.zeros((0, 3), np.int64)
    tris = _qhull_triangles(pts)
    if tris is None:
        log.debug("qhull output rejected; using sweep triangulation for %d points", n)
        tris = sweep_triangulation(pts)
    tris = _legalize(pts, tris, break_ties)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    return e, tris


def delaunay_triangulate(points, break_ties: bool = True) -> PageGraph:
    """Delaunay edge set of ``points`` as a :class:`PageGraph`.

    Duplicate points are attached to their first occurrence by a
    zero-length edge.  All-collinear input yields the path along the line.
    The returned graph's ``neighbors()`` lists are sorted by angle.
    With ``break_ties=False`` cocircular quadruples keep whichever valid
    diagonal Qhull chose, which is deterministic but not index-canonical.
    """
    pts = _as_points(points)
    n = len(pts)
    reps, rep_of = _dedupe(pts)
    edges, tris = _triangulate_unique(pts[reps], break_ties)
    edges = reps[edges] if len(edges) else edges.reshape(0, 2)
    tris = reps[tris] if len(tris) else tris.reshape(0, 3)
    dup = np.flatnonzero(rep_of != np.arange(n))
    if len(dup):
        edges = np.concatenate([edges, np.stack([rep_of[dup], dup], axis=1)])
    edges = np.sort(edges.reshape(-1, 2), axis=1)
    lengths = np.linalg.norm(pts[edges[:, 0]] - pts[edges[:, 1]], axis=1)
    g = PageGraph(n, edges, lengths, triangles=tris)
    g._neighbors = _angular_neighbors(pts, g)
    return g


def _angular_neighbors(pts: np.ndarray, g: PageGraph) -> list[np.ndarray]:
    src, dst = g.directed()
    d = pts[src] - pts[dst]
    ang = np.arctan2(d[:, 1], d[:, 0])
    order = np.lexsort((src, ang, dst))
    src, dst = src[order], dst[order]
    bounds = np.searchsorted(dst, np.arange(g.node_count + 1))
    return [src[bounds[i]:bounds[i + 1]] for i in range(g.node_count)]
