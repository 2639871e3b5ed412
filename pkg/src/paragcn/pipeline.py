"""Two-stage paragraph extraction: split raw lines, then cluster lines."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .datagen.labels import cut_lines
from .datagen.ocr import order_along_axis
from .features import PageStats, line_node_features, word_node_features
from .geometry.graph import PageGraph
from .geometry.polygon import convex_hull
from .geometry.quad import as_quads, quad_widths, union_bound
from .geometry.skeleton import beta_skeleton_boxes
from .graphnet.model import GcnModel, forward
from .unionfind import connected_components

log = logging.getLogger(__name__)


@dataclass
class Line:
    words: list[int]            # reading order
    box: np.ndarray             # (4, 2)
    first_word_width: float


@dataclass
class Paragraph:
    lines: list[int]
    region: np.ndarray          # convex polygon


@dataclass
class Extraction:
    lines: list[Line]
    paragraphs: list[Paragraph]
    word_probs: np.ndarray | None = None    # (words, 2)
    edge_probs: np.ndarray | None = None    # (line graph edges,)
    line_graph: PageGraph | None = None


def skeleton(boxes) -> PageGraph:
    return beta_skeleton_boxes(as_quads(boxes))


def make_lines(words, groups: list[list[int]]) -> list[Line]:
    """Order each group along its axis and bound it tightly."""
    words = as_quads(words)
    out = []
    for g in groups:
        if not g:
            log.warning("dropping empty line")
            continue
        ordered = order_along_axis(words, g)
        out.append(Line(ordered, union_bound(words[ordered]),
                        float(quad_widths(words[ordered[:1]])[0])))
    return out


def _require(model: GcnModel, head: str, width: int, role: str) -> None:
    cfg = model.config
    if cfg.head_type != head or cfg.input_width != width:
        raise ValueError(f"{role} model must have head_type={head} and input_width={width}, "
                         f"got {cfg.head_type}/{cfg.input_width}")


def predict_word_probs(words, model: GcnModel, graph: PageGraph | None = None) -> np.ndarray:
    words = as_quads(words)
    _require(model, "node_binary_pair", 29, "split")
    if len(words) == 0:
        return np.zeros((0, 2))
    graph = skeleton(words) if graph is None else graph
    return forward(model, word_node_features(words), graph)


def split_lines(words, raw_lines: list[list[int]], model: GcnModel | None,
                graph: PageGraph | None = None, threshold: float = 0.5,
                probs: np.ndarray | None = None) -> list[Line]:
    """Cut raw lines where a word ends a line or the next one starts one.

    ``model=None`` together with ``probs`` reuses precomputed predictions.
    """
    words = as_quads(words)
    kept = [r for r in raw_lines if r]
    if len(kept) < len(raw_lines):
        log.warning("dropped %d empty raw lines", len(raw_lines) - len(kept))
    covered = {w for r in kept for w in r}
    kept += [[w] for w in range(len(words)) if w not in covered]
    if probs is None:
        probs = predict_word_probs(words, model, graph)
    groups = cut_lines(words, kept, probs[:, 0], probs[:, 1], threshold)
    return make_lines(words, groups)


def line_features(words, lines: list[Line]) -> np.ndarray:
    stats = PageStats.from_words(words)
    boxes = np.array([ln.box for ln in lines]).reshape(-1, 4, 2)
    return line_node_features(boxes, [ln.first_word_width for ln in lines], stats)


def cluster_lines(lines: list[Line], model: GcnModel, words=None, graph: PageGraph | None = None,
                  threshold: float = 0.5, return_probs: bool = False):
    """Paragraphs = connected components of lines under positive edges."""
    _require(model, "edge_binary", 30, "cluster")
    boxes = np.array([ln.box for ln in lines]).reshape(-1, 4, 2)
    if words is None:
        words = boxes
    probs = np.zeros(0)
    if len(lines) == 0:
        paras = []
    else:
        graph = skeleton(boxes) if graph is None else graph
        if graph.edge_count:
            probs = forward(model, line_features(words, lines), graph)
        positive = graph.edges[probs >= threshold] if graph.edge_count else []
        paras = [Paragraph(c, convex_hull(boxes[c].reshape(-1, 2)))
                 for c in connected_components(len(lines), positive)]
    if return_probs:
        return paras, probs, graph
    return paras


def extract_paragraphs(words, raw_lines: list[list[int]], split_model: GcnModel,
                       cluster_model: GcnModel, threshold: float = 0.5,
                       word_graph: PageGraph | None = None) -> Extraction:
    """Split, then cluster; every output line lands in exactly one paragraph.

    ``word_graph`` may supply a precomputed skeleton of ``words``.
    """
    words = as_quads(words)
    if len(words) == 0:
        return Extraction([], [])
    wp = predict_word_probs(words, split_model, word_graph)
    lines = split_lines(words, raw_lines, None, threshold=threshold, probs=wp)
    paras, ep, g = cluster_lines(lines, cluster_model, words, threshold=threshold, return_probs=True)
    return Extraction(lines, paras, wp, ep, g)
