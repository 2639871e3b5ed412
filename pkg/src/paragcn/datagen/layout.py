"""Programmatic page layouts: pseudo-words set into lines, paragraphs and columns."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry.quad import rect_corners
from .page import Page
from .style import StyleSpec

PAGE_SIZE = (850.0, 1100.0)
BASE_HEIGHT = 12.0


@dataclass
class _Line:
    column: int
    y: float
    height: float
    spans: list[tuple[float, float]]
    paragraph: int


@dataclass
class _Layout:
    lines: list[_Line] = field(default_factory=list)
    table_rows: list[tuple[float, float, list[tuple[float, float]]]] = field(default_factory=list)
    tables: list[np.ndarray] = field(default_factory=list)
    n_paragraphs: int = 0


class _Writer:
    def __init__(self, style: StyleSpec, rng: np.random.Generator, page_size):
        self.s, self.rng = style, rng
        W, H = page_size
        self.h = BASE_HEIGHT * style.font_scale
        self.pitch = self.h * style.line_height_factor
        self.space = 0.3 * self.h
        left = style.left_margin_fraction * W
        right = rng.uniform(0.04, 0.14) * W
        self.top = rng.uniform(0.05, 0.12) * H
        self.bottom = H - rng.uniform(0.05, 0.1) * H
        text_w = W - left - right
        C = style.column_count
        col_pitch = text_w / C
        col_w = col_pitch * style.column_width_fraction
        if C > 1:
            col_w = min(col_w, col_pitch - 0.8 * self.h)
        if col_w < 6 * self.h or self.bottom - self.top < 2 * self.pitch:
            raise ValueError(f"style cannot fit one line: column width {col_w:.1f} for word height {self.h:.1f}")
        self.col_x = [left + c * col_pitch for c in range(C)]
        self.col_w = col_w
        self.aligned_edge = style.alignment in ("left", "justified")
        if style.paragraph_separator == "indent":
            self.indent = rng.uniform(2.5, 5.0) * 0.5 * self.h
            self.para_gap = rng.uniform(0.0, 0.12) * self.pitch
        else:
            self.indent = 0.0
            self.para_gap = rng.uniform(0.5, 1.2) * self.pitch
        if not self.aligned_edge:
            # centred or right-aligned text has no visible indent
            self.indent = 0.0
            self.para_gap = max(self.para_gap, rng.uniform(0.5, 1.0) * self.pitch)

    def word_width(self, scale: float = 1.0) -> float:
        w = 2.5 * self.h * math.exp(self.rng.normal(-0.08, 0.4))
        return float(np.clip(w, 0.5 * self.h, 7 * self.h)) * scale

    def fill(self, avail: float, target: float, scale: float = 1.0) -> list[float]:
        widths: list[float] = []
        total = 0.0
        while True:
            w = self.word_width(scale)
            if not widths:
                if w > avail:
                    w = avail * self.rng.uniform(0.4, 0.9)
                widths.append(w)
                total = w
                continue
            if total + self.space * scale + w > target:
                return widths
            widths.append(w)
            total += self.space * scale + w

    def place(self, widths, x0: float, avail: float, stretch: bool, scale: float = 1.0):
        gap = self.space * scale
        total = sum(widths) + gap * (len(widths) - 1)
        if stretch and len(widths) > 1:
            gap = (avail - sum(widths)) / (len(widths) - 1)
            total = avail
        if self.s.alignment == "right":
            x0 = x0 + avail - total
        elif self.s.alignment == "center":
            x0 = x0 + (avail - total) / 2
        spans, x = [], x0
        for w in widths:
            spans.append((x, x + w))
            x += w + gap
        return spans


def _paragraph_lengths(rng) -> int:
    return int(min(1 + rng.geometric(0.25), 10))


def generate_page(style: StyleSpec, seed, page_size=PAGE_SIZE,
                  word_range: tuple[int, int] = (120, 260)) -> Page:
    """Lay out one synthetic page.

    Paragraphs flow through the columns top to bottom; a paragraph cut by a
    column break becomes two ground-truth paragraphs.  Justified lines
    stretch their inter-word gaps to the column width except the last
    line of a paragraph.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence([int(seed), 0x4C59])
    rng = np.random.default_rng(ss)
    wr = _Writer(style, rng, page_size)
    C = style.column_count
    h, pitch = wr.h, wr.pitch
    avg_words = wr.col_w / (2.6 * h + wr.space)
    target = rng.uniform(*word_range)
    rows = max(2, int(math.ceil(target / max(avg_words, 1.0) / C)))
    col_bottom = min(wr.bottom, wr.top + rows * pitch * 1.1)
    out = _Layout()
    para = -1
    remaining = 0          # lines left in the paragraph being set
    kind = "text"
    table_left = rng.random() < style.table_probability
    for c in range(C):
        x0 = wr.col_x[c]
        y = wr.top
        first_in_col = True
        if c == 0 and rng.random() < style.title_probability:
            scale = 1.5
            k = int(rng.integers(2, 7))
            widths = []
            for _ in range(k):
                w = wr.word_width(scale)
                if sum(widths) + w + wr.space * scale * len(widths) > wr.col_w:
                    break
                widths.append(w)
            widths = widths or [wr.col_w * 0.5]
            out.n_paragraphs += 1
            spans = wr.place(widths, x0, wr.col_w, False, scale)
            out.lines.append(_Line(c, y, h * scale, spans, out.n_paragraphs - 1))
            y += h * scale + 0.8 * pitch
            first_in_col = False
        while True:
            if remaining == 0:
                if table_left and not first_in_col and rng.random() < 0.3:
                    n_rows = int(rng.integers(3, 7))
                    if y + wr.para_gap + n_rows * pitch <= col_bottom:
                        table_left = False
                        y = _place_table(out, wr, c, y + max(wr.para_gap, 0.5 * pitch), n_rows) + 0.5 * pitch
                        continue
                if not first_in_col:
                    y += wr.para_gap
                if y + h > col_bottom:
                    break
                list_item = wr.aligned_edge and rng.random() < style.list_item_probability
                kind = "list" if list_item else "text"
                remaining = int(rng.integers(1, 4)) if list_item else _paragraph_lengths(rng)
                out.n_paragraphs += 1
                para = out.n_paragraphs - 1
                line_no = 0
            elif first_in_col:
                # continuation of a paragraph broken by the column end
                out.n_paragraphs += 1
                para = out.n_paragraphs - 1
            if y + h > col_bottom:
                break
            last = remaining == 1
            hang = 1.8 * h if kind == "list" else 0.0
            lead = wr.indent if (kind == "text" and line_no == 0) else hang
            avail = wr.col_w - lead
            full = avail if not last else avail * rng.uniform(0.15, 0.9)
            if kind == "list" and line_no == 0:
                widths = wr.fill(avail, full)
                spans = [(x0, x0 + 0.6 * h)] + wr.place(widths, x0 + lead, avail, style.alignment == "justified" and not last)
            else:
                widths = wr.fill(avail, full)
                spans = wr.place(widths, x0 + lead, avail, style.alignment == "justified" and not last)
            out.lines.append(_Line(c, y, h, spans, para))
            y += pitch
            remaining -= 1
            line_no += 1
            first_in_col = False
    return _to_page(out, style, page_size, ss, wr)


def _place_table(out: _Layout, wr: _Writer, c: int, y: float, n_rows: int) -> float:
    rng, h = wr.rng, wr.h
    n_cols = int(rng.integers(2, 5))
    x0 = wr.col_x[c]
    cell = wr.col_w / n_cols
    y0 = y
    for _ in range(n_rows):
        spans = []
        for j in range(n_cols):
            w = cell * rng.uniform(0.25, 0.7)
            spans.append((x0 + j * cell, x0 + j * cell + w))
        out.table_rows.append((y, h, spans))
        y += wr.pitch
    pad = 0.2 * h
    out.tables.append(rect_corners(x0 - pad, y0 - pad, x0 + wr.col_w + pad, y - wr.pitch + h + pad))
    return y


def _to_page(out: _Layout, style: StyleSpec, page_size, ss, wr: _Writer) -> Page:
    words, word_line, raw_lines, gt_lines = [], [], [], []
    paras: dict[int, list[int]] = {}
    for li, ln in enumerate(out.lines):
        ids = []
        for x0, x1 in ln.spans:
            ids.append(len(words))
            words.append(rect_corners(x0, ln.y, x1, ln.y + ln.height))
            word_line.append(li)
        raw_lines.append(ids)
        gt_lines.append(rect_corners(ln.spans[0][0], ln.y, ln.spans[-1][1], ln.y + ln.height))
        paras.setdefault(ln.paragraph, []).append(li)
    for y, hh, spans in out.table_rows:
        ids = []
        for x0, x1 in spans:
            ids.append(len(words))
            words.append(rect_corners(x0, y, x1, y + hh))
            word_line.append(-1)
        raw_lines.append(ids)
    links = []
    by_col: dict[int, list[int]] = {}
    for li, ln in enumerate(out.lines):
        by_col.setdefault(ln.column, []).append(li)
    for c in range(style.column_count - 1):
        best: dict[int, tuple[float, int]] = {}
        for a in by_col.get(c, []):
            la = out.lines[a]
            for b in by_col.get(c + 1, []):
                lb = out.lines[b]
                ov = min(la.y + la.height, lb.y + lb.height) - max(la.y, lb.y)
                if ov > 0.5 * min(la.height, lb.height) and (b not in best or ov > best[b][0]):
                    best[b] = (ov, a)
        used = set()
        for b, (_, a) in sorted(best.items()):
            if a not in used:
                used.add(a)
                links.append((a, b))
    gap = (wr.col_x[1] - wr.col_x[0] - wr.col_w) if style.column_count > 1 else None
    meta = {"style": style.to_dict(), "seed_entropy": str(ss.entropy),
            "word_height": wr.h, "column_gap": gap, "column_x": wr.col_x, "column_width": wr.col_w,
            "indent": wr.indent, "paragraph_gap": wr.para_gap, "line_pitch": wr.pitch}
    page = Page(page_size, np.array(words).reshape(-1, 4, 2), raw_lines,
                np.array(gt_lines).reshape(-1, 4, 2), [paras[k] for k in sorted(paras)],
                dont_care=out.tables, word_line=np.array(word_line, dtype=np.int64),
                row_links=sorted(links), meta=meta)
    page.validate()
    return page
