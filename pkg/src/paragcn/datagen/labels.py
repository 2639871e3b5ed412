"""Training labels derived from ground truth by maximum-intersection matching."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ..geometry.graph import PageGraph
from ..geometry.polygon import polygon_intersection_area
from ..geometry.quad import as_quads, union_bound
from .ocr import order_along_axis
from .page import Page


def _bbox(polys: list[np.ndarray]) -> np.ndarray:
    if not polys:
        return np.zeros((0, 4))
    return np.array([[p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max()] for p in polys])


def allocate(boxes, targets) -> tuple[np.ndarray, np.ndarray]:
    """Index of the target with maximum intersection area per box (-1 if none)
    and that area.  Ties go to the lower target index."""
    boxes = list(as_quads(boxes)) if not isinstance(boxes, list) else boxes
    targets = list(as_quads(targets)) if not isinstance(targets, list) else targets
    idx = np.full(len(boxes), -1, dtype=np.int64)
    best = np.zeros(len(boxes))
    if not boxes or not targets:
        return idx, best
    bb, tb = _bbox(boxes), _bbox(targets)
    cand = ((bb[:, None, 0] <= tb[None, :, 2]) & (tb[None, :, 0] <= bb[:, None, 2])
            & (bb[:, None, 1] <= tb[None, :, 3]) & (tb[None, :, 1] <= bb[:, None, 3]))
    for i, j in zip(*np.nonzero(cand)):
        a = polygon_intersection_area(boxes[i], targets[j])
        if a > best[i]:
            best[i], idx[i] = a, j
    return idx, best


def dont_care_words(page: Page) -> np.ndarray:
    """Words touching a don't-care region."""
    out = np.zeros(len(page.words), dtype=bool)
    if page.dont_care:
        idx, area = allocate(list(page.words), page.dont_care)
        out = area > 0
    return out


def derive_split_labels(page: Page) -> np.ndarray:
    """(words, 3) array of [is_start, is_end, weight].

    Each word goes to the gt line it overlaps most; within a gt line the
    first and last words along the reading axis are the start and end.
    Words overlapping no gt line, or touching a don't-care region, get
    weight 0.
    """
    n = len(page.words)
    labels = np.zeros((n, 3))
    if n == 0:
        return labels
    alloc, _ = allocate(list(page.words), list(page.gt_lines))
    dc = dont_care_words(page)
    for li in range(len(page.gt_lines)):
        ids = [i for i in np.flatnonzero(alloc == li).tolist() if not dc[i]]
        if not ids:
            continue
        ordered = order_along_axis(page.words, ids)
        labels[ordered, 2] = 1.0
        labels[ordered[0], 0] = 1.0
        labels[ordered[-1], 1] = 1.0
    return labels


def cut_lines(words: np.ndarray, raw_lines: list[list[int]], p_start: np.ndarray,
              p_end: np.ndarray, threshold: float = 0.5) -> list[list[int]]:
    """Cut each raw line between u and v when P_end(u) or P_start(v) passes
    ``threshold``."""
    out = []
    for line in raw_lines:
        if not line:
            continue
        ordered = order_along_axis(words, line)
        cur = [ordered[0]]
        for u, v in zip(ordered[:-1], ordered[1:]):
            if p_end[u] >= threshold or p_start[v] >= threshold:
                out.append(cur)
                cur = []
            cur.append(v)
        out.append(cur)
    return out


def split_by_labels(page: Page, labels: np.ndarray | None = None) -> list[list[int]]:
    """Raw lines cut exactly where the split labels say (the ideal stage-1 output).
    Don't-care words never trigger a cut."""
    lab = derive_split_labels(page) if labels is None else labels
    active = lab[:, 2] > 0
    return cut_lines(page.words, page.raw_lines, lab[:, 0] * active, lab[:, 1] * active)


def line_quads(words: np.ndarray, lines: list[list[int]]) -> np.ndarray:
    if not lines:
        return np.zeros((0, 4, 2))
    return np.array([union_bound(words[line]) for line in lines])


@dataclass
class ClusterLabels:
    labels: np.ndarray          # (edges,) 1 for same-paragraph neighbours
    weights: np.ndarray         # (edges,) 0 for don't-care
    line_to_gt: np.ndarray      # (lines,) matched gt line (or paragraph) index, -1 if none
    under_split: bool           # some line spans two or more gt lines


def derive_cluster_labels(page: Page, lines: list[list[int]], graph: PageGraph,
                          boxes: np.ndarray | None = None) -> ClusterLabels:
    """Edge labels for the line clustering model.

    An edge is positive when both lines fall in the same gt paragraph on
    consecutive gt lines, or on the same gt line (an over-split line).
    Without line ground truth, "consecutive" becomes "no shorter path in
    the graph between the two lines".
    """
    boxes = line_quads(page.words, lines) if boxes is None else boxes
    E = graph.edge_count
    dc_word = dont_care_words(page)
    dc_line = np.array([all(dc_word[w] for w in line) for line in lines], dtype=bool)
    labels = np.zeros(E)
    weights = np.ones(E)
    if page.has_line_gt:
        to_gt, _ = allocate(list(boxes), list(page.gt_lines))
        word_gt, _ = allocate(list(page.words), list(page.gt_lines))
        under = any(len({int(word_gt[w]) for w in line if word_gt[w] >= 0 and not dc_word[w]}) > 1
                    for line in lines)
        para_of = np.full(len(page.gt_lines), -1)
        for k, p in enumerate(page.gt_paragraphs):
            para_of[p] = k
        for e, (a, b) in enumerate(graph.edges):
            ga, gb = to_gt[a], to_gt[b]
            if dc_line[a] or dc_line[b] or ga < 0 or gb < 0:
                weights[e] = 0.0
                continue
            labels[e] = float(ga == gb or (para_of[ga] == para_of[gb] and abs(ga - gb) == 1))
        return ClusterLabels(labels, weights, to_gt, under)

    regions = [np.asarray(r, np.float64) for r in page.meta.get("paragraph_regions", [])]
    to_par, _ = allocate(list(boxes), regions)
    n = len(lines)
    shortest = np.zeros((n, n))
    if E:
        scale = max(float(graph.lengths.max()), 1.0)
        w = graph.lengths + 1e-9 * scale      # csgraph drops explicit zeros
        mat = csr_matrix((np.concatenate([w, w]),
                          (np.concatenate([graph.edges[:, 0], graph.edges[:, 1]]),
                           np.concatenate([graph.edges[:, 1], graph.edges[:, 0]]))), shape=(n, n))
        shortest = dijkstra(mat, directed=False)
    for e, (a, b) in enumerate(graph.edges):
        pa, pb = to_par[a], to_par[b]
        if dc_line[a] or dc_line[b] or pa < 0 or pb < 0:
            weights[e] = 0.0
            continue
        direct = graph.lengths[e] + 1e-9 * max(float(graph.lengths.max()), 1.0)
        labels[e] = float(pa == pb and shortest[a, b] >= direct * (1 - 1e-12))
    return ClusterLabels(labels, weights, to_par, False)
