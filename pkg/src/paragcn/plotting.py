"""PNG figures: page overlays, evaluation curves and training curves."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402

from .datagen.page import Page  # noqa: E402
from .metrics import THRESHOLDS  # noqa: E402

_PNG_META = {"Software": None}


def _polys(ax, polys, **kw):
    polys = [np.asarray(p, np.float64).reshape(-1, 2) for p in polys if len(p)]
    if polys:
        ax.add_collection(PolyCollection(polys, facecolors="none", **kw))


def render_overlay(page: Page, path, lines=None, paragraphs=None, show_gt: bool = True,
                   title: str | None = None) -> None:
    """Words in blue, lines in green, paragraphs in red; gt paragraphs dashed grey."""
    W, H = page.image_size
    fig, ax = plt.subplots(figsize=(6, 6 * H / W if W else 6))
    if show_gt:
        _polys(ax, page.gt_regions(), edgecolors="0.55", linewidths=1.2, linestyles="--")
    _polys(ax, page.dont_care, edgecolors="orange", linewidths=1.0, linestyles=":")
    _polys(ax, page.words, edgecolors="tab:blue", linewidths=0.4)
    if lines is not None:
        _polys(ax, [ln.box for ln in lines], edgecolors="tab:green", linewidths=0.6)
    if paragraphs is not None:
        _polys(ax, [p.region for p in paragraphs], edgecolors="tab:red", linewidths=1.0)
    pts = [page.words.reshape(-1, 2)] + [np.asarray(r).reshape(-1, 2) for r in page.gt_regions()]
    pts = np.concatenate([p for p in pts if len(p)] or [np.array([[0.0, 0.0], [W, H]])])
    pad = 0.02 * max(W, H, 1.0)
    ax.set_xlim(min(0.0, pts[:, 0].min()) - pad, max(W, pts[:, 0].max()) + pad)
    ax.set_ylim(max(H, pts[:, 1].max()) + pad, min(0.0, pts[:, 1].min()) - pad)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=110, metadata=_PNG_META)
    plt.close(fig)


def plot_eval_summary(summaries: dict[str, dict], path) -> None:
    """Precision and recall against IoU threshold, one pair of curves per method."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, s in sorted(summaries.items()):
        ax.plot(THRESHOLDS, [s[f"precision@{t:.2f}"] for t in THRESHOLDS], marker="o", ms=3,
                label=f"{name} precision")
        ax.plot(THRESHOLDS, [s[f"recall@{t:.2f}"] for t in THRESHOLDS], marker="s", ms=3, ls="--",
                label=f"{name} recall (F1var {s['f1_var']:.3f}, mAP {s['map']:.3f})")
    ax.set_xlabel("IoU threshold")
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=110, metadata=_PNG_META)
    plt.close(fig)


def plot_history(history: list[dict], path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ep = [h["epoch"] for h in history]
    ax.plot(ep, [h["train_loss"] for h in history], label="train")
    if history and "val_loss" in history[0]:
        ax.plot(ep, [h["val_loss"] for h in history], label="held out")
    ax.set_xlabel("epoch")
    ax.set_ylabel("weighted BCE")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="png", dpi=110, metadata=_PNG_META)
    plt.close(fig)
