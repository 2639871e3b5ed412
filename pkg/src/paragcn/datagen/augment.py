"""Geometric augmentation: a random perspective projection, then a rotation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..geometry.quad import quad_heights, signed_areas
from .page import Page

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AugmentSpec:
    max_rotation: float = math.radians(45.0)
    max_corner_shift: float = 0.10     # fraction of page width/height
    seed: int = 0
    max_retries: int = 20

    def __post_init__(self):
        if not 0 <= self.max_rotation <= math.pi:
            raise ValueError("max_rotation: must lie in [0, pi]")
        if not 0 <= self.max_corner_shift < 0.25:
            raise ValueError("max_corner_shift: must lie in [0, 0.25)")


def homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 projective map taking the 4 ``src`` points onto ``dst``."""
    A, b = [], []
    for (x, y), (u, v) in zip(src, dst):
        A.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        A.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        b += [u, v]
    h = np.linalg.solve(np.array(A, dtype=np.float64), np.array(b, dtype=np.float64))
    return np.append(h, 1.0).reshape(3, 3)


def apply_homography(matrix: np.ndarray, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    hom = np.hstack([pts, np.ones((len(pts), 1))]) @ matrix.T
    return hom[:, :2] / hom[:, 2:3]


def rotation(theta: float, center) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    cx, cy = center
    return np.array([[c, -s, cx - c * cx + s * cy], [s, c, cy - s * cx - c * cy], [0, 0, 1.0]])


def sample_transform(page_size, spec: AugmentSpec, rng: np.random.Generator) -> np.ndarray:
    W, H = page_size
    src = np.array([[0, 0], [W, 0], [W, H], [0, H]], dtype=np.float64)
    shift = rng.uniform(-spec.max_corner_shift, spec.max_corner_shift, (4, 2)) * [W, H]
    P = homography(src, src + shift)
    theta = rng.uniform(-spec.max_rotation, spec.max_rotation)
    return rotation(theta, (W / 2, H / 2)) @ P


def augment_page(page: Page, spec: AugmentSpec) -> Page:
    """Projective distortion followed by a rotation, applied to all boxes.

    Labels and indices are untouched.  Draws that shrink any box below a
    fifth of its height or flip its orientation are redrawn.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(spec.seed), 0x4155]))
    h0 = quad_heights(page.words) if len(page.words) else np.zeros(0)
    for attempt in range(spec.max_retries):
        M = sample_transform(page.image_size, spec, rng)
        out = page.transformed(lambda p: apply_homography(M, p))
        if len(out.words) == 0:
            break
        ok = np.all(signed_areas(out.words) > 0) and np.all(quad_heights(out.words) >= 0.2 * h0)
        if ok and np.all(np.isfinite(out.words)):
            break
        log.debug("augmentation draw %d degenerate; redrawing", attempt)
    else:
        raise ValueError(f"no valid augmentation after {spec.max_retries} draws")
    meta = dict(out.meta)
    meta["augment"] = M.tolist()
    out.meta = meta
    return out
