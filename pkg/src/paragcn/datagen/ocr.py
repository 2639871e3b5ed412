"""OCR simulation: jittered word boxes and imperfect raw lines."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry.quad import quad_heights
from ..unionfind import UnionFind
from .page import Page


@dataclass(frozen=True)
class OcrSpec:
    jitter: float = 0.04      # max corner displacement, fraction of word height
    p_merge: float = 0.5      # side-by-side lines joined across a column gap
    p_break: float = 0.05     # gt line broken into two raw lines

    def __post_init__(self):
        for name in ("jitter", "p_merge", "p_break"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name}: must lie in [0, 1], got {v}")
        if self.jitter > 0.2:
            raise ValueError("jitter: must be <= 0.2")


def order_along_axis(words: np.ndarray, ids) -> list[int]:
    """Sort word indices by projection onto their common longitudinal axis."""
    ids = list(ids)
    if len(ids) < 2:
        return ids
    q = words[ids]
    axis = ((q[:, 1] - q[:, 0]) + (q[:, 2] - q[:, 3])).sum(axis=0)
    norm = np.hypot(*axis)
    axis = axis / norm if norm > 0 else np.array([1.0, 0.0])
    proj = q.mean(axis=1) @ axis
    return [ids[i] for i in np.lexsort((ids, proj))]


def simulate_ocr(page: Page, seed, spec: OcrSpec = OcrSpec()) -> Page:
    """Jitter word corners and rebuild raw lines from the gt lines.

    Lines linked side by side across columns are merged with probability
    ``p_merge``; lines not merged are broken at a random inner gap with
    probability ``p_break``.  Table rows stay as they are.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence([int(seed), 0x4F43])
    rng = np.random.default_rng(ss)
    words = page.words.copy()
    if spec.jitter > 0 and len(words):
        h = quad_heights(words)[:, None, None]
        words = words + rng.uniform(-spec.jitter, spec.jitter, words.shape) * h
    if page.word_line is None:
        return page.with_changes(words=words)
    m = len(page.gt_lines)
    members: list[list[int]] = [[] for _ in range(m)]
    for i, li in enumerate(page.word_line.tolist()):
        if li >= 0:
            members[li].append(i)
    uf = UnionFind(m)
    merged = np.zeros(m, dtype=bool)
    for a, b in page.row_links:
        if rng.random() < spec.p_merge:
            uf.union(a, b)
            merged[a] = merged[b] = True
    raw: list[list[int]] = []
    for group in uf.groups():
        ids = [w for li in group for w in members[li]]
        if not ids:
            continue
        if len(group) == 1 and not merged[group[0]] and len(ids) > 1 and rng.random() < spec.p_break:
            ordered = order_along_axis(words, ids)
            cut = int(rng.integers(1, len(ordered)))
            raw += [ordered[:cut], ordered[cut:]]
        else:
            raw.append(order_along_axis(words, ids))
    table = [line for line in page.raw_lines if all(page.word_line[w] < 0 for w in line)]
    raw += [order_along_axis(words, line) for line in table]
    raw.sort(key=min)
    return page.with_changes(words=words, raw_lines=raw)
