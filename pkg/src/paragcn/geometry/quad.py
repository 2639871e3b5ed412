"""Oriented quadrilaterals for words, lines and paragraphs.

Corners are stored as a (4, 2) array in reading order: top-left, top-right,
bottom-right, bottom-left, in page coordinates with y pointing down.  In
that frame the corner sequence has positive signed area.  Batched helpers
take arrays of shape (n, 4, 2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True, eq=False)
class Quad:
    corners: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.corners, dtype=np.float64).reshape(4, 2)
        if not np.all(np.isfinite(c)):
            raise ValueError("quad corners must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "corners", c)

    @classmethod
    def from_rect(cls, x0: float, y0: float, x1: float, y1: float) -> "Quad":
        return cls(rect_corners(x0, y0, x1, y1))

    @property
    def width(self) -> float:
        return float(quad_widths(self.corners[None])[0])

    @property
    def height(self) -> float:
        return float(quad_heights(self.corners[None])[0])

    @property
    def angle(self) -> float:
        return float(quad_angles(self.corners[None])[0])

    @property
    def center(self) -> np.ndarray:
        return self.corners.mean(axis=0)

    def __eq__(self, other):
        return isinstance(other, Quad) and np.array_equal(self.corners, other.corners)

    def __hash__(self):
        return hash(self.corners.tobytes())


def rect_corners(x0, y0, x1, y1) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)


def as_quads(boxes) -> np.ndarray:
    """Coerce a sequence of :class:`Quad` or corner arrays to (n, 4, 2)."""
    if isinstance(boxes, np.ndarray):
        arr = boxes.astype(np.float64, copy=False)
    else:
        arr = np.array([b.corners if isinstance(b, Quad) else b for b in boxes],
                       dtype=np.float64)
    if arr.size == 0:
        return arr.reshape(0, 4, 2)
    return arr.reshape(-1, 4, 2)


def quad_widths(q: np.ndarray) -> np.ndarray:
    top = np.linalg.norm(q[:, 1] - q[:, 0], axis=1)
    bottom = np.linalg.norm(q[:, 2] - q[:, 3], axis=1)
    return 0.5 * (top + bottom)


def quad_heights(q: np.ndarray) -> np.ndarray:
    left = np.linalg.norm(q[:, 3] - q[:, 0], axis=1)
    right = np.linalg.norm(q[:, 2] - q[:, 1], axis=1)
    return 0.5 * (left + right)


def quad_angles(q: np.ndarray) -> np.ndarray:
    """Angle of the longitudinal axis against the page x-axis, in (-pi, pi]."""
    axis = (q[:, 1] - q[:, 0]) + (q[:, 2] - q[:, 3])
    ang = np.arctan2(axis[:, 1], axis[:, 0])
    return np.where(ang <= -np.pi, np.pi, ang)


def quad_axes(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit longitudinal and transverse (downward) axes per quad."""
    ang = quad_angles(q)
    u = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    v = np.stack([-u[:, 1], u[:, 0]], axis=1)
    return u, v


def signed_areas(q: np.ndarray) -> np.ndarray:
    x, y = q[..., 0], q[..., 1]
    return 0.5 * np.sum(x * np.roll(y, -1, axis=-1) - np.roll(x, -1, axis=-1) * y, axis=-1)


def oriented_bound(points: np.ndarray, angle: float) -> np.ndarray:
    """Tightest rectangle with longitudinal axis at ``angle`` covering points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    u = np.array([np.cos(angle), np.sin(angle)])
    v = np.array([-u[1], u[0]])
    pu, pv = pts @ u, pts @ v
    u0, u1, v0, v1 = pu.min(), pu.max(), pv.min(), pv.max()
    return np.array([u0 * u + v0 * v, u1 * u + v0 * v, u1 * u + v1 * v, u0 * u + v1 * v])


def mean_angle(angles: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Circular mean of angles."""
    w = np.ones_like(angles) if weights is None else weights
    return float(np.arctan2(np.sum(w * np.sin(angles)), np.sum(w * np.cos(angles))))


def union_bound(quads: np.ndarray) -> np.ndarray:
    """Oriented bound of several quads along their width-weighted mean angle."""
    quads = as_quads(quads)
    ang = mean_angle(quad_angles(quads), quad_widths(quads) + 1e-12)
    return oriented_bound(quads.reshape(-1, 2), ang)


def transform_quads(q: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Apply a 3x3 projective transform to every corner."""
    flat = q.reshape(-1, 2)
    hom = np.hstack([flat, np.ones((len(flat), 1))]) @ matrix.T
    return (hom[:, :2] / hom[:, 2:3]).reshape(q.shape)


def rotation_matrix(theta: float, center=(0.0, 0.0)) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    cx, cy = center
    return np.array([[c, -s, cx - c * cx + s * cy],
                     [s, c, cy - s * cx - c * cy],
                     [0.0, 0.0, 1.0]])
