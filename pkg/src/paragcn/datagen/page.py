"""The :class:`Page` record shared by generation, training and evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..geometry.polygon import convex_hull
from ..geometry.quad import as_quads, quad_heights


@dataclass
class Page:
    """Boxes, lines and paragraphs of one page.

    ``raw_lines`` hold word indices in reading order.  ``gt_paragraphs`` are
    lists of gt-line indices; gt lines are numbered in reading order, so two
    consecutive lines of a paragraph have consecutive indices.
    ``word_line`` (generator metadata) maps each word to its gt line, -1
    for words outside any line (table cells).  ``row_links`` are pairs of gt
    lines sitting side by side in neighbouring columns.
    """

    image_size: tuple[float, float]
    words: np.ndarray
    raw_lines: list[list[int]]
    gt_lines: np.ndarray
    gt_paragraphs: list[list[int]]
    dont_care: list[np.ndarray] = field(default_factory=list)
    word_line: np.ndarray | None = None
    row_links: list[tuple[int, int]] = field(default_factory=list)
    has_line_gt: bool = True
    node_labels: np.ndarray | None = None   # (words, 3): start, end, weight
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.words = as_quads(self.words)
        self.gt_lines = as_quads(self.gt_lines)
        self.raw_lines = [[int(i) for i in line] for line in self.raw_lines]
        self.gt_paragraphs = [[int(i) for i in p] for p in self.gt_paragraphs]
        self.dont_care = [np.asarray(p, dtype=np.float64).reshape(-1, 2) for p in self.dont_care]
        self.row_links = [(int(a), int(b)) for a, b in self.row_links]
        if self.word_line is not None:
            self.word_line = np.asarray(self.word_line, dtype=np.int64)
        if self.node_labels is not None:
            self.node_labels = np.asarray(self.node_labels, dtype=np.float64).reshape(-1, 3)

    @property
    def word_count(self) -> int:
        return len(self.words)

    def validate(self) -> None:
        n, m = len(self.words), len(self.gt_lines)
        seen = np.zeros(n, dtype=int)
        for line in self.raw_lines:
            if not line:
                raise ValueError("empty raw line")
            for i in line:
                if not 0 <= i < n:
                    raise ValueError(f"raw line word index {i} out of range [0, {n})")
                seen[i] += 1
        if np.any(seen > 1):
            raise ValueError("a word appears in more than one raw line")
        if self.has_line_gt:
            flat = [i for p in self.gt_paragraphs for i in p]
            if sorted(flat) != list(range(m)):
                raise ValueError("every gt line must belong to exactly one gt paragraph")
        if self.word_line is not None and len(self.word_line) != n:
            raise ValueError("word_line length differs from word count")
        if self.node_labels is not None:
            if len(self.node_labels) != n:
                raise ValueError("node_labels length differs from word count")
            if not np.all(np.isin(self.node_labels[:, 2], (0.0, 1.0))):
                raise ValueError("label weights must be 0 or 1")
        if not np.all(np.isfinite(self.words)) or not np.all(np.isfinite(self.gt_lines)):
            raise ValueError("non-finite coordinates")

    def median_word_height(self) -> float:
        if len(self.words) == 0:
            return 1.0
        h = float(np.median(quad_heights(self.words)))
        return h if h > 0 else 1.0

    def gt_regions(self) -> list[np.ndarray]:
        """Paragraph regions: hull of member gt line quads."""
        if not self.has_line_gt:
            return [np.asarray(p, np.float64) for p in self.meta.get("paragraph_regions", [])]
        return [convex_hull(self.gt_lines[p].reshape(-1, 2)) for p in self.gt_paragraphs]

    def gt_line_counts(self) -> list[int]:
        if not self.has_line_gt:
            return [0] * len(self.meta.get("paragraph_regions", []))
        return [len(p) for p in self.gt_paragraphs]

    def with_changes(self, **kw) -> "Page":
        return replace(self, **kw)

    def transformed(self, fn) -> "Page":
        """Apply ``fn`` (maps (k, 2) points to (k, 2) points) to every geometry."""
        def tq(q):
            return fn(q.reshape(-1, 2)).reshape(q.shape) if len(q) else q
        meta = dict(self.meta)
        if "paragraph_regions" in meta:
            meta["paragraph_regions"] = [fn(np.asarray(p, np.float64)).tolist() for p in meta["paragraph_regions"]]
        return replace(self, words=tq(self.words), gt_lines=tq(self.gt_lines),
                       dont_care=[fn(p) for p in self.dont_care], meta=meta)
