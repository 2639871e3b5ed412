"""From pages to training samples, with per-page caching of graphs."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .datagen.augment import AugmentSpec, augment_page
from .datagen.labels import derive_cluster_labels, derive_split_labels, split_by_labels
from .datagen.layout import generate_page
from .datagen.ocr import OcrSpec, simulate_ocr
from .datagen.page import Page
from .datagen.style import StyleSpec, sample_style
from .features import word_node_features
from .geometry.graph import PageGraph
from .graphnet.model import GcnModel
from .graphnet.training import Sample
from .pipeline import Line, line_features, make_lines, predict_word_probs, skeleton, split_lines
from .rng import child_seed, seed_sequence

log = logging.getLogger(__name__)


def synthesize_page(seed: int, index: int, augment: bool = False, ocr: OcrSpec = OcrSpec(),
                    table_probability: float = 0.0, style: StyleSpec | None = None,
                    augment_spec: AugmentSpec | None = None) -> Page:
    """Page ``index`` of the run seeded by ``seed``.

    The layout depends only on (seed, index), so the augmented and plain
    versions of a page share their text layout.
    """
    st = style or sample_style(seed_sequence(seed, "style", index), table_probability)
    page = generate_page(st, seed_sequence(seed, "layout", index))
    if augment:
        base = augment_spec or AugmentSpec()
        spec = AugmentSpec(base.max_rotation, base.max_corner_shift, child_seed(seed, "augment", index),
                           base.max_retries)
        page = augment_page(page, spec)
    page = simulate_ocr(page, seed_sequence(seed, "ocr", index), ocr)
    page.node_labels = derive_split_labels(page)
    page.meta["index"] = index
    return page


@dataclass
class PreparedPage:
    """A page plus lazily built graphs and labels."""

    page: Page
    _word_graph: PageGraph | None = field(default=None, repr=False)
    _labels: np.ndarray | None = field(default=None, repr=False)

    @property
    def word_graph(self) -> PageGraph:
        if self._word_graph is None:
            self._word_graph = skeleton(self.page.words)
        return self._word_graph

    @property
    def split_labels(self) -> np.ndarray:
        if self._labels is None:
            lab = self.page.node_labels
            self._labels = derive_split_labels(self.page) if lab is None else lab
        return self._labels

    def split_sample(self) -> Sample:
        lab = self.split_labels
        return Sample(word_node_features(self.page.words), self.word_graph, lab[:, :2],
                      np.repeat(lab[:, 2:], 2, axis=1))

    def lines(self, split_model: GcnModel | None = None) -> list[Line]:
        if split_model is None:
            return make_lines(self.page.words, split_by_labels(self.page, self.split_labels))
        probs = predict_word_probs(self.page.words, split_model, self.word_graph)
        return split_lines(self.page.words, self.page.raw_lines, None, probs=probs)

    def cluster_sample(self, split_model: GcnModel | None = None) -> Sample | None:
        """None when the page has no line pairs or a line spans two gt lines."""
        lines = self.lines(split_model)
        if len(lines) < 2:
            return None
        boxes = np.array([ln.box for ln in lines])
        g = skeleton(boxes)
        lab = derive_cluster_labels(self.page, [ln.words for ln in lines], g, boxes)
        if lab.under_split:
            return None
        if g.edge_count == 0:
            return None
        return Sample(line_features(self.page.words, lines), g, lab.labels, lab.weights)


def split_samples(prepared: list[PreparedPage]) -> list[Sample]:
    return [p.split_sample() for p in prepared if len(p.page.words)]


def cluster_samples(prepared: list[PreparedPage], split_model: GcnModel | None = None) -> list[Sample]:
    out, dropped = [], 0
    for p in prepared:
        s = p.cluster_sample(split_model)
        if s is None:
            dropped += 1
        else:
            out.append(s)
    if dropped:
        log.info("cluster training: %d of %d pages skipped (under-split or no line pairs)",
                 dropped, len(prepared))
    return out
