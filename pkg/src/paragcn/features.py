"""Per-box node features in a page-normalized frame."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry.quad import as_quads, quad_angles, quad_heights, quad_widths

WORD_FEATURES = 29
LINE_FEATURES = 30


@dataclass(frozen=True)
class PageStats:
    """Normalization frame: subtract ``origin`` then divide by ``unit``."""

    origin: tuple[float, float]
    unit: float

    @classmethod
    def from_words(cls, words) -> "PageStats":
        q = as_quads(words)
        if len(q) == 0:
            return cls((0.0, 0.0), 1.0)
        c = q.mean(axis=1).mean(axis=0)
        h = float(np.median(quad_heights(q)))
        return cls((float(c[0]), float(c[1])), h if h > 0 else 1.0)


def box_features(boxes, stats: PageStats) -> np.ndarray:
    """(n, 29): w, h, alpha, cos, sin, then per corner x, x cos, x sin, y, y cos, y sin."""
    q = as_quads(boxes)
    n = len(q)
    pts = (q - np.asarray(stats.origin)) / stats.unit
    w = quad_widths(q) / stats.unit
    h = np.maximum(quad_heights(q) / stats.unit, np.where(quad_widths(q) * quad_heights(q) > 0, 0.0, 1.0))
    a = quad_angles(q)
    ca, sa = np.cos(a), np.sin(a)
    out = np.empty((n, WORD_FEATURES))
    out[:, 0], out[:, 1], out[:, 2], out[:, 3], out[:, 4] = w, h, a, ca, sa
    for k in range(4):
        x, y = pts[:, k, 0], pts[:, k, 1]
        out[:, 5 + 6 * k:11 + 6 * k] = np.stack([x, x * ca, x * sa, y, y * ca, y * sa], axis=1)
    return out


def word_node_features(words, stats: PageStats | None = None) -> np.ndarray:
    stats = PageStats.from_words(words) if stats is None else stats
    return box_features(words, stats)


def line_node_features(line_boxes, first_word_widths, stats: PageStats) -> np.ndarray:
    """Line box features plus the first word's width (30 values)."""
    base = box_features(line_boxes, stats)
    w1 = np.minimum(np.asarray(first_word_widths, np.float64) / stats.unit, base[:, 0])
    return np.hstack([base, w1[:, None]])
