"""Brute-force reference implementations used only by the test-suite."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def _exact_dot_sign(a, b, p) -> int:
    a0, a1, b0, b1, p0, p1 = map(Fraction, (a[0], a[1], b[0], b[1], p[0], p[1]))
    v = (a0 - p0) * (b0 - p0) + (a1 - p1) * (b1 - p1)
    return (v > 0) - (v < 0)


def _exact_cross(a, b, p) -> int:
    a0, a1, b0, b1, p0, p1 = map(Fraction, (a[0], a[1], b[0], b[1], p[0], p[1]))
    v = (b0 - a0) * (p1 - a1) - (b1 - a1) * (p0 - a0)
    return (v > 0) - (v < 0)


def delaunay_oracle(pts: np.ndarray) -> set[tuple[int, int]]:
    """Edges of every triangle whose circumcircle has no point strictly inside."""
    pts = np.asarray(pts, dtype=np.float64)
    n = len(pts)
    edges = set()
    q = [tuple(map(Fraction, p)) for p in pts]
    for i, j, k in itertools.combinations(range(n), 3):
        (ax, ay), (bx, by), (cx, cy) = q[i], q[j], q[k]
        det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if det == 0:
            continue
        if det < 0:
            (bx, by), (cx, cy) = (cx, cy), (bx, by)
        empty = True
        for m in range(n):
            if m in (i, j, k):
                continue
            dx, dy = q[m]
            adx, ady, bdx, bdy, cdx, cdy = ax - dx, ay - dy, bx - dx, by - dy, cx - dx, cy - dy
            v = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
                 + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
                 + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
            if v > 0:
                empty = False
                break
        if empty:
            edges |= {(i, j), (j, k), (i, k)}
    return edges


def gabriel_oracle(pts: np.ndarray) -> set[tuple[int, int]]:
    """All pairs whose open diametral disk contains no third point."""
    pts = np.asarray(pts, dtype=np.float64)
    n = len(pts)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            d = np.einsum("ij,ij->i", pts[i] - pts, pts[j] - pts)
            d[[i, j]] = np.inf
            scale = np.abs(pts[i] - pts).max() * np.abs(pts[j] - pts).max() + 1e-300
            sure = d > 1e-12 * scale
            if np.all(sure):
                edges.add((i, j))
                continue
            if np.any(d < -1e-12 * scale):
                continue
            if all(_exact_dot_sign(pts[i], pts[j], pts[k]) >= 0
                   for k in np.flatnonzero(~sure) if k not in (i, j)):
                edges.add((i, j))
    return edges


def _inside_quad_many(q: np.ndarray, pts: np.ndarray) -> np.ndarray:
    area = sum(q[i, 0] * q[(i + 1) % 4, 1] - q[(i + 1) % 4, 0] * q[i, 1] for i in range(4))
    if area < 0:
        q = q[::-1]
    inside = np.ones(len(pts), dtype=bool)
    for i in range(4):
        a, b = q[i], q[(i + 1) % 4]
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        scale = (abs(b[0] - a[0]) + abs(b[1] - a[1])) * (np.abs(pts - a).sum(axis=1) + 1.0)
        unsure = np.abs(cross) <= 1e-12 * scale
        sign = np.sign(cross)
        for k in np.flatnonzero(unsure):
            sign[k] = _exact_cross(a, b, pts[k])
        inside &= sign >= 0
    return inside


def box_skeleton_oracle(quads: np.ndarray, points: np.ndarray, owner: np.ndarray,
                        midline: np.ndarray) -> dict[tuple[int, int], float]:
    """Box pair -> edge length, from all-pairs diametral tests over samples."""
    internal = midline.copy()
    overlap = set()
    for b in range(len(quads)):
        hit = _inside_quad_many(quads[b], points) & (owner != b)
        internal |= hit
        for o in np.unique(owner[hit & ~midline]).tolist():
            overlap.add((min(b, o), max(b, o)))
    best: dict[tuple[int, int], float] = {pair: 0.0 for pair in overlap}
    cand = np.flatnonzero(~internal)
    scale = 1e-12 * (1.0 + np.abs(points).max()) ** 2
    sq = np.einsum("kc,kc->k", points, points)
    for ii, i in enumerate(cand):
        js = cand[ii + 1:]
        js = js[owner[js] != owner[i]]
        if len(js) == 0:
            continue
        # (p_i - p_k).(p_j - p_k) expanded so the bulk is one matrix product
        d = (points[js] @ points[i])[:, None] - (points[js] + points[i]) @ points.T + sq[None, :]
        d[:, i] = np.inf
        d[np.arange(len(js)), js] = np.inf
        blocked = np.any(d < -scale, axis=1)
        for row in np.flatnonzero(~blocked):
            j = js[row]
            unsure = np.flatnonzero(d[row] <= scale)
            if any(_exact_dot_sign(points[i], points[j], points[k]) < 0 for k in unsure):
                continue
            key = (int(min(owner[i], owner[j])), int(max(owner[i], owner[j])))
            length = float(np.linalg.norm(points[i] - points[j]))
            if key not in best or length < best[key]:
                best[key] = length
    return best


def random_boxes(rng: np.random.Generator, n: int, extent: float = 100.0,
                 rotate: bool = False, allow_overlap: bool = False) -> np.ndarray:
    """Rejection-sample ``n`` word-like boxes."""
    out: list[np.ndarray] = []
    tries = 0
    while len(out) < n and tries < 100 * n:
        tries += 1
        w, h = rng.uniform(3, 15), rng.uniform(2, 5)
        cx, cy = rng.uniform(0, extent, 2)
        ang = rng.uniform(-np.pi, np.pi) if rotate else 0.0
        u = np.array([np.cos(ang), np.sin(ang)])
        v = np.array([-u[1], u[0]])
        c = np.array([cx, cy])
        q = np.array([c - w / 2 * u - h / 2 * v, c + w / 2 * u - h / 2 * v,
                      c + w / 2 * u + h / 2 * v, c - w / 2 * u + h / 2 * v])
        if not allow_overlap and any(_boxes_overlap(q, o) for o in out):
            continue
        out.append(q)
    return np.array(out)


def _boxes_overlap(a: np.ndarray, b: np.ndarray) -> bool:
    for poly in (a, b):
        for i in range(4):
            e = poly[(i + 1) % 4] - poly[i]
            axis = np.array([-e[1], e[0]])
            pa, pb = a @ axis, b @ axis
            if pa.max() < pb.min() or pb.max() < pa.min():
                return False
    return True


def gradient_check(seed: int, step: float = 1e-6) -> tuple[float, str]:
    """Worst relative error between analytic and central-difference gradients.

    Small float64 model on a random point graph; biases and the input
    normalization are randomized so no pre-activation sits exactly on a
    ReLU kink.  The relative error uses a 1e-6 floor for coordinates whose
    gradient is numerically zero.
    """
    from paragcn.geometry import beta_skeleton_points
    from paragcn.graphnet import GcnConfig, Sample, init_model, loss_and_gradients

    rng = np.random.default_rng(seed)
    head = ("node_binary_pair", "edge_binary")[seed % 2]
    pooling = ("attention", "average")[(seed // 2) % 2]
    cfg = GcnConfig(steps=2, hidden_width=8, heads=2, pooling=pooling, head_type=head, input_width=5)
    model = init_model(cfg, seed, dtype=np.float64)
    for k, v in model.params.items():
        if k.endswith(".b"):
            model.params[k] = rng.normal(0, 0.3, v.shape)
    model.params["input.shift"] = rng.normal(size=5)
    model.params["input.scale"] = rng.uniform(0.5, 2, 5)
    n = int(rng.integers(3, 12))
    g = beta_skeleton_points(rng.uniform(0, 10, (n, 2)))
    X = rng.normal(size=(n, 5))
    rows = n if head == "node_binary_pair" else g.edge_count
    y = (rng.random((rows, cfg.outputs)) < 0.4).astype(float)
    w = (rng.random((rows, cfg.outputs)) < 0.8).astype(float)
    if cfg.outputs == 1:
        y, w = y[:, 0], w[:, 0]
    sample = Sample(X, g, y, w)
    _, grads = loss_and_gradients(model, sample, pos_weight=2.0)
    worst, where = 0.0, ""
    for k, v in model.params.items():
        if k in ("input.shift", "input.scale"):
            continue
        for idx in np.ndindex(v.shape):
            old = v[idx]
            v[idx] = old + step
            lp, _ = loss_and_gradients(model, sample, pos_weight=2.0)
            v[idx] = old - step
            lm, _ = loss_and_gradients(model, sample, pos_weight=2.0)
            v[idx] = old
            fd = (lp - lm) / (2 * step)
            a = grads[k][idx]
            err = abs(fd - a) / max(abs(fd), abs(a), 1e-6)
            if err > worst:
                worst, where = err, f"{k}{list(idx)}"
    return worst, where
