"""Paragraph detection scores: IoU matching, F1 at fixed or line-count thresholds, mAP."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry.polygon import iou

THRESHOLDS = tuple(round(0.5 + 0.05 * k, 2) for k in range(10))


def variable_iou_threshold(n_lines: int) -> float:
    """IoU needed to match a paragraph of ``n_lines`` lines."""
    if n_lines < 1:
        raise ValueError(f"n_lines must be >= 1, got {n_lines}")
    return min(1.0 - 1.0 / (1.0 + n_lines), 0.95)


@dataclass
class MatchResult:
    matches: list[tuple[int, int, float]]    # (pred, gt, iou)
    n_pred: int
    n_gt: int

    @property
    def precision(self) -> float:
        return len(self.matches) / self.n_pred if self.n_pred else (1.0 if self.n_gt == 0 else 0.0)

    @property
    def recall(self) -> float:
        return len(self.matches) / self.n_gt if self.n_gt else (1.0 if self.n_pred == 0 else 0.0)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


def iou_matrix(preds, gts) -> np.ndarray:
    out = np.zeros((len(preds), len(gts)))
    for i, p in enumerate(preds):
        pb = (p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max())
        for j, g in enumerate(gts):
            if (pb[0] > g[:, 0].max() or g[:, 0].min() > pb[2]
                    or pb[1] > g[:, 1].max() or g[:, 1].min() > pb[3]):
                continue
            out[i, j] = iou(p, g)
    return out


def greedy_match(ious: np.ndarray, thresholds: np.ndarray) -> list[tuple[int, int, float]]:
    """One-to-one matching in descending IoU; a pair is accepted when its IoU
    reaches the gt's threshold.  Ties resolve by (pred, gt) index."""
    if ious.size == 0:
        return []
    pi, gi = np.nonzero(ious >= thresholds[None, :])
    vals = ious[pi, gi]
    order = np.lexsort((gi, pi, -vals))
    used_p, used_g, out = set(), set(), []
    for k in order:
        p, g = int(pi[k]), int(gi[k])
        if p in used_p or g in used_g:
            continue
        used_p.add(p)
        used_g.add(g)
        out.append((p, g, float(vals[k])))
    return out


def _prepare(preds, gts, dont_care=()):
    """Drop predictions whose best overlap is a don't-care region."""
    preds = [np.asarray(p, np.float64) for p in preds]
    polys = [np.asarray(g[0] if isinstance(g, tuple) else g, np.float64) for g in gts]
    lines = [int(g[1]) if isinstance(g, tuple) else 1 for g in gts]
    ious = iou_matrix(preds, polys)
    keep = np.arange(len(preds))
    if len(dont_care) and len(preds):
        dc = iou_matrix(preds, [np.asarray(d, np.float64) for d in dont_care])
        best_gt = ious.max(axis=1) if ious.shape[1] else np.zeros(len(preds))
        keep = np.flatnonzero(~(dc.max(axis=1) > best_gt))
    return ious[keep], np.array(lines, dtype=np.int64), keep


def match_paragraphs(preds, gts, mode="variable", dont_care=()) -> MatchResult:
    """``gts`` holds (polygon, n_lines) pairs; ``mode`` is "variable" or a
    fixed IoU threshold."""
    ious, lines, keep = _prepare(preds, gts, dont_care)
    if mode == "variable":
        thr = np.array([variable_iou_threshold(max(n, 1)) for n in lines])
    else:
        thr = np.full(len(lines), float(mode))
    matches = [(int(keep[p]), g, v) for p, g, v in greedy_match(ious, thr)]
    return MatchResult(matches, len(keep), len(lines))


def map_fixed_range(preds, gts, dont_care=()) -> float:
    """Mean over IoU 0.50..0.95 of precision x recall."""
    return float(np.mean([ap for _, ap in ap_by_threshold(preds, gts, dont_care)]))


def ap_by_threshold(preds, gts, dont_care=()) -> list[tuple[float, float]]:
    ious, lines, keep = _prepare(preds, gts, dont_care)
    out = []
    for t in THRESHOLDS:
        r = MatchResult(greedy_match(ious, np.full(len(lines), t)), len(keep), len(lines))
        out.append((t, r.precision * r.recall))
    return out


@dataclass
class ClassificationPR:
    precision: float
    recall: float
    defined: bool = True
    tp: int = 0
    fp: int = 0
    fn: int = 0


def classification_pr(probs, labels, weights, threshold: float = 0.5) -> ClassificationPR:
    """Positive-class precision/recall over weighted items.  With no
    positive labels recall is undefined: ``defined`` is False and the
    values are NaN."""
    p = np.asarray(probs, np.float64).ravel()
    y = np.asarray(labels, np.float64).ravel() > 0.5
    w = np.asarray(weights, np.float64).ravel() > 0
    if not (len(p) == len(y) == len(w)):
        raise ValueError("probs, labels and weights must align")
    pred = p >= threshold
    tp = int(np.sum(pred & y & w))
    fp = int(np.sum(pred & ~y & w))
    fn = int(np.sum(~pred & y & w))
    if tp + fn == 0:
        return ClassificationPR(math.nan, math.nan, False, tp, fp, fn)
    prec = tp / (tp + fp) if tp + fp else math.nan
    return ClassificationPR(prec, tp / (tp + fn), tp + fp > 0, tp, fp, fn)


@dataclass
class EvalReport:
    pages: int = 0
    n_pred: int = 0
    n_gt: int = 0
    matched_var: int = 0
    matched: dict = field(default_factory=lambda: {t: 0 for t in THRESHOLDS})
    per_page: list = field(default_factory=list)

    def add(self, preds, gts, dont_care=(), page_id=None, fixed_only: bool = False) -> dict:
        """Score one page.  Pages without line counts (``fixed_only``) use
        IoU 0.5 in place of the line-count thresholds."""
        ious, lines, keep = _prepare(preds, gts, dont_care)
        if fixed_only:
            thr = np.full(len(lines), 0.5)
        else:
            thr = np.array([variable_iou_threshold(max(n, 1)) for n in lines])
        var = greedy_match(ious, thr)
        rec = {"page": page_id, "n_pred": len(keep), "n_gt": len(lines), "matched_var": len(var),
               "matches": [(int(keep[p]), g, round(v, 6)) for p, g, v in var]}
        for t in THRESHOLDS:
            k = len(greedy_match(ious, np.full(len(lines), t)))
            self.matched[t] += k
            rec[f"matched@{t:.2f}"] = k
        self.pages += 1
        self.n_pred += len(keep)
        self.n_gt += len(lines)
        self.matched_var += len(var)
        self.per_page.append(rec)
        return rec

    @staticmethod
    def _f1(m, n_pred, n_gt):
        r = MatchResult([None] * m, n_pred, n_gt)
        return r.precision, r.recall, r.f1

    def summary(self) -> dict:
        p, r, f = self._f1(self.matched_var, self.n_pred, self.n_gt)
        out = {"pages": self.pages, "n_pred": self.n_pred, "n_gt": self.n_gt,
               "precision_var": p, "recall_var": r, "f1_var": f}
        aps = []
        for t in THRESHOLDS:
            pt, rt, ft = self._f1(self.matched[t], self.n_pred, self.n_gt)
            out[f"precision@{t:.2f}"], out[f"recall@{t:.2f}"] = pt, rt
            aps.append(pt * rt)
            if t in (0.5, 0.75):
                out[f"f1@{t:.2f}"] = ft
        out["map"] = float(np.mean(aps))
        return out


def report_to_dict(rep: EvalReport) -> dict:
    d = asdict(rep)
    d["matched"] = {f"{k:.2f}": v for k, v in rep.matched.items()}
    return d
