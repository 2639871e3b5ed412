"""Rule-based paragraph baseline.

1. split raw lines at gaps much wider than the page's average word gap;
2. group nearby lines into blocks;
3. within a block, re-join pieces sitting on the same straight line;
4. within a block, start a new paragraph at every indented line.

All geometry is evaluated in the page's dominant reading frame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry.polygon import convex_hull
from .geometry.quad import as_quads, mean_angle, quad_angles, quad_heights, quad_widths
from .pipeline import Extraction, Paragraph, make_lines
from .unionfind import UnionFind


@dataclass(frozen=True)
class HeuristicParams:
    wide_space_factor: float = 2.0      # x average word gap
    block_distance: float = 1.5         # x line height
    same_line_tolerance: float = 0.5    # vertical centre offset, x line height
    indent_threshold: float = 1.0       # x average character width
    char_width_ratio: float = 0.5       # average character width / word height

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not v > 0:
                raise ValueError(f"{k}: must be > 0")


def _frame(words: np.ndarray) -> np.ndarray:
    """Axis-aligned bounds (x0, y0, x1, y1) of each word in the reading frame."""
    ang = mean_angle(quad_angles(words), quad_widths(words) + 1e-12)
    c, s = np.cos(-ang), np.sin(-ang)
    R = np.array([[c, -s], [s, c]])
    pts = words @ R.T
    return np.concatenate([pts.min(axis=1), pts.max(axis=1)], axis=1)


def _span(b: np.ndarray, ids) -> np.ndarray:
    sub = b[list(ids)]
    return np.array([sub[:, 0].min(), sub[:, 1].min(), sub[:, 2].max(), sub[:, 3].max()])


def heuristic_paragraphs(words, raw_lines: list[list[int]],
                         params: HeuristicParams = HeuristicParams()) -> Extraction:
    words = as_quads(words)
    if len(words) == 0:
        return Extraction([], [])
    b = _frame(words)
    h = float(np.median(quad_heights(words))) or 1.0
    covered = {w for r in raw_lines for w in r}
    lines = [sorted(r, key=lambda w: (b[w, 0], w)) for r in raw_lines if r]
    lines += [[w] for w in range(len(words)) if w not in covered]

    # step 1: cut at wide spaces
    gaps = [b[v, 0] - b[u, 2] for ln in lines for u, v in zip(ln[:-1], ln[1:])]
    avg = float(np.mean(np.maximum(gaps, 0))) if gaps else 0.0
    pieces = []
    for ln in lines:
        cur = [ln[0]]
        for u, v in zip(ln[:-1], ln[1:]):
            if avg > 0 and b[v, 0] - b[u, 2] > params.wide_space_factor * avg:
                pieces.append(cur)
                cur = []
            cur.append(v)
        pieces.append(cur)
    pieces.sort(key=min)
    spans = np.array([_span(b, p) for p in pieces])

    # step 2: blocks of vertically close, horizontally overlapping pieces
    n = len(pieces)
    uf = UnionFind(n)
    for i in range(n):
        xo = np.minimum(spans[i, 2], spans[:, 2]) - np.maximum(spans[i, 0], spans[:, 0])
        yg = np.maximum(spans[i, 1], spans[:, 1]) - np.minimum(spans[i, 3], spans[:, 3])
        for j in np.flatnonzero((xo > 0) & (yg <= params.block_distance * h)):
            if j > i:
                uf.union(i, int(j))

    # step 3: merge pieces on the same straight line within a block
    blocks = uf.groups()
    out_lines: list[list[int]] = []
    out_blocks: list[list[int]] = []
    for blk in blocks:
        blk = sorted(blk, key=lambda i: ((spans[i, 1] + spans[i, 3]) / 2, spans[i, 0], min(pieces[i])))
        merged: list[list[int]] = []
        centre = None
        for i in blk:
            yc = (spans[i, 1] + spans[i, 3]) / 2
            if merged and abs(yc - centre) <= params.same_line_tolerance * h:
                merged[-1] += pieces[i]
            else:
                merged.append(list(pieces[i]))
                centre = yc
        ids = []
        for m in merged:
            ids.append(len(out_lines))
            out_lines.append(sorted(m, key=lambda w: (b[w, 0], w)))
        out_blocks.append(ids)

    # step 4: indented lines open new paragraphs
    line_objs = make_lines(words, out_lines)
    indent = params.indent_threshold * params.char_width_ratio * h
    paras: list[list[int]] = []
    for ids in out_blocks:
        left = min(b[out_lines[i][0], 0] for i in ids)
        for k, i in enumerate(ids):
            if k == 0 or b[out_lines[i][0], 0] - left > indent:
                paras.append([i])
            else:
                paras[-1].append(i)
    boxes = np.array([ln.box for ln in line_objs])
    return Extraction(line_objs, [Paragraph(p, convex_hull(boxes[p].reshape(-1, 2))) for p in paras])
