"""Sign-exact orientation, in-circle and diametral-disk predicates.

Each predicate is evaluated in floating point first.  Results whose
magnitude falls under a conservative forward error bound are recomputed
with rational arithmetic, so the returned sign is always exact for the
given (binary) float inputs.
"""
from __future__ import annotations

import numpy as np

_EPS = np.finfo(np.float64).eps
# Deliberately looser than the tight Shewchuk constants.
_ORIENT_BOUND = 8.0 * _EPS
_INCIRCLE_BOUND = 32.0 * _EPS


def _sign(value) -> int:
    return 1 if value > 0 else (-1 if value < 0 else 0)


def _ints(*vals: float) -> list[int]:
    """Scale floats by a common power of two so they become exact ints."""
    ratios = [float(v).as_integer_ratio() for v in vals]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = _ints(ax, ay, bx, by, cx, cy)
    return _sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _incircle_exact(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = _ints(ax, ay, bx, by, cx, cy, dx, dy)
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def _diametral_exact(ax, ay, bx, by, px, py) -> int:
    ax, ay, bx, by, px, py = _ints(ax, ay, bx, by, px, py)
    return _sign((ax - px) * (bx - px) + (ay - py) * (by - py))


def orient2d(a, b, c) -> int:
    """+1 if a, b, c turn counter-clockwise, -1 if clockwise, 0 if collinear."""
    t1 = (b[0] - a[0]) * (c[1] - a[1])
    t2 = (b[1] - a[1]) * (c[0] - a[0])
    det = t1 - t2
    if abs(det) > _ORIENT_BOUND * (abs(t1) + abs(t2)):
        return _sign(det)
    return _orient_exact(a[0], a[1], b[0], b[1], c[0], c[1])


def incircle(a, b, c, d) -> int:
    """+1 if d lies strictly inside the circle through CCW a, b, c; 0 if on it."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = (alift * (abs(bdx * cdy) + abs(cdx * bdy))
                 + blift * (abs(cdx * ady) + abs(adx * cdy))
                 + clift * (abs(adx * bdy) + abs(bdx * ady)))
    if abs(det) > _INCIRCLE_BOUND * permanent:
        return _sign(det)
    return _incircle_exact(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])


def orient2d_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized :func:`orient2d` over rows of (n, 2) arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    t1 = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
    t2 = (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    det = t1 - t2
    out = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= _ORIENT_BOUND * (np.abs(t1) + np.abs(t2))
    for i in np.flatnonzero(unsure):
        out[i] = _orient_exact(a[i, 0], a[i, 1], b[i, 0], b[i, 1], c[i, 0], c[i, 1])
    return out


def incircle_many(a, b, c, d) -> np.ndarray:
    """Vectorized :func:`incircle`; a, b, c must be counter-clockwise."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    adx, ady = a[:, 0] - d[:, 0], a[:, 1] - d[:, 1]
    bdx, bdy = b[:, 0] - d[:, 0], b[:, 1] - d[:, 1]
    cdx, cdy = c[:, 0] - d[:, 0], c[:, 1] - d[:, 1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = (alift * (np.abs(bdx * cdy) + np.abs(cdx * bdy))
                 + blift * (np.abs(cdx * ady) + np.abs(adx * cdy))
                 + clift * (np.abs(adx * bdy) + np.abs(bdx * ady)))
    out = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= _INCIRCLE_BOUND * permanent
    for i in np.flatnonzero(unsure):
        out[i] = _incircle_exact(a[i, 0], a[i, 1], b[i, 0], b[i, 1],
                                 c[i, 0], c[i, 1], d[i, 0], d[i, 1])
    return out


def diametral_many(a, b, p) -> np.ndarray:
    """Sign of (a - p)·(b - p) per row: -1 means p is strictly inside the
    disk with diameter ab, 0 on its circle, +1 outside."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    t1 = (a[:, 0] - p[:, 0]) * (b[:, 0] - p[:, 0])
    t2 = (a[:, 1] - p[:, 1]) * (b[:, 1] - p[:, 1])
    dot = t1 + t2
    out = np.sign(dot).astype(np.int8)
    unsure = np.abs(dot) <= _ORIENT_BOUND * (np.abs(t1) + np.abs(t2))
    for i in np.flatnonzero(unsure):
        out[i] = _diametral_exact(a[i, 0], a[i, 1], b[i, 0], b[i, 1], p[i, 0], p[i, 1])
    return out
