"""Convex hulls, convex clipping and polygon IoU.

Polygons are (k, 2) float arrays.  "CCW" here means positive signed area
in the stored coordinates; with the page's y axis pointing down that
renders clockwise on screen, which is irrelevant to every computation.
"""
from __future__ import annotations

import numpy as np

from .predicates import orient2d, orient2d_many


def polygon_area(poly) -> float:
    p = np.asarray(poly, dtype=np.float64).reshape(-1, 2)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def convex_hull(points) -> np.ndarray:
    """Monotone-chain hull, CCW, collinear boundary points removed."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex_hull needs at least one point")
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) <= 2:
        return np.array(uniq, dtype=np.float64)

    def half(seq):
        chain: list[tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2 and orient2d(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all points collinear: keep the two extremes
        return np.array([uniq[0], uniq[-1]], dtype=np.float64)
    return np.array(hull, dtype=np.float64)


def ensure_ccw(poly) -> np.ndarray:
    p = np.asarray(poly, dtype=np.float64).reshape(-1, 2)
    return p[::-1].copy() if polygon_area(p) < 0 else p


def clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman: part of ``subject`` inside convex CCW ``clip``."""
    out = np.asarray(subject, dtype=np.float64).reshape(-1, 2)
    clip = np.asarray(clip, dtype=np.float64).reshape(-1, 2)
    n = len(clip)
    for i in range(n):
        if len(out) == 0:
            break
        a, b = clip[i], clip[(i + 1) % n]
        edge = b - a
        side = edge[0] * (out[:, 1] - a[1]) - edge[1] * (out[:, 0] - a[0])
        inside = side >= 0
        if inside.all():
            continue
        nxt_pts = np.roll(out, -1, axis=0)
        nxt_side = np.roll(side, -1)
        nxt_inside = np.roll(inside, -1)
        res = []
        for k in range(len(out)):
            if inside[k]:
                res.append(out[k])
            if inside[k] != nxt_inside[k]:
                t = side[k] / (side[k] - nxt_side[k])
                res.append(out[k] + t * (nxt_pts[k] - out[k]))
        out = np.array(res).reshape(-1, 2)
    return out


def polygon_intersection_area(a, b) -> float:
    """Intersection area of two convex polygons (either winding)."""
    a = ensure_ccw(a)
    b = ensure_ccw(b)
    if len(a) < 3 or len(b) < 3 or polygon_area(a) <= 0 or polygon_area(b) <= 0:
        return 0.0
    amin, amax = a.min(axis=0), a.max(axis=0)
    bmin, bmax = b.min(axis=0), b.max(axis=0)
    if np.any(amax < bmin) or np.any(bmax < amin):
        return 0.0
    return max(0.0, polygon_area(clip_convex(a, b)))


def is_convex(poly) -> bool:
    p = ensure_ccw(poly)
    n = len(p)
    if n < 4:
        return True
    return all(orient2d(p[i], p[(i + 1) % n], p[(i + 2) % n]) >= 0 for i in range(n))


def convex_pieces(poly) -> list[np.ndarray]:
    """Split a simple polygon into convex pieces (ear-clipping triangles)."""
    p = ensure_ccw(poly)
    if is_convex(p):
        return [p]
    idx = list(range(len(p)))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10 * len(p):
        guard += 1
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            if orient2d(p[i0], p[i1], p[i2]) <= 0:
                continue
            ear = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if (orient2d(p[i0], p[i1], p[j]) >= 0 and orient2d(p[i1], p[i2], p[j]) >= 0
                        and orient2d(p[i2], p[i0], p[j]) >= 0):
                    ear = False
                    break
            if ear:
                tris.append(p[[i0, i1, i2]])
                idx.pop(k)
                break
        else:
            break
    if len(idx) == 3:
        tris.append(p[idx])
    return tris


def intersection_area(a, b) -> float:
    """Intersection area allowing simple non-convex inputs."""
    pa, pb = convex_pieces(a), convex_pieces(b)
    return float(sum(polygon_intersection_area(x, y) for x in pa for y in pb))


def iou(a, b) -> float:
    inter = intersection_area(a, b)
    union = abs(polygon_area(a)) + abs(polygon_area(b)) - inter
    return inter / union if union > 0 else 0.0


def point_in_convex(poly, pts) -> np.ndarray:
    """Closed containment test of (m, 2) points in a convex CCW polygon."""
    poly = ensure_ccw(poly)
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    inside = np.ones(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        sign = orient2d_many(np.broadcast_to(a, pts.shape), np.broadcast_to(b, pts.shape), pts)
        inside &= sign >= 0
    return inside
