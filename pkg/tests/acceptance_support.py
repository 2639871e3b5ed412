"""Cached corpora and trained models shared by the acceptance checks.

Everything expensive lands in ``.cache/acceptance`` (override with the
``PARAGCN_CACHE`` environment variable) so repeated runs reuse it.  Cache
entries are keyed by the settings that produced them.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import pickle
import time
from pathlib import Path

import numpy as np

from paragcn.datagen import StyleSpec, sample_style
from paragcn.graphnet import GcnConfig, TrainConfig, forward, init_model, load_model, save_model, train
from paragcn.heuristic import heuristic_paragraphs
from paragcn.metrics import EvalReport, classification_pr
from paragcn.pipeline import extract_paragraphs
from paragcn.prepare import PreparedPage, cluster_samples, split_samples, synthesize_page
from paragcn.rng import seed_sequence

log = logging.getLogger("acceptance")

ROOT = Path(__file__).resolve().parents[1]
CACHE = Path(os.environ.get("PARAGCN_CACHE", ROOT / ".cache" / "acceptance"))
SEED = 2024
N_PAGES = 2000
HOLDOUT = 0.2
N_TRAIN = N_PAGES - int(round(N_PAGES * HOLDOUT))
DENSE_PAGES = 150

TRAIN = TrainConfig(epochs=100, patience=30)
SPLIT_CFG = GcnConfig()
CLUSTER_CFG = GcnConfig(head_type="edge_binary", input_width=30)


def _key(*parts) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True, default=str).encode()).hexdigest()[:12]


def _cached(name: str, build):
    CACHE.mkdir(parents=True, exist_ok=True)
    path = CACHE / f"{name}.pkl"
    if path.exists():
        with open(path, "rb") as fh:
            return pickle.load(fh)
    obj = build()
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        pickle.dump(obj, fh, protocol=pickle.HIGHEST_PROTOCOL)
    tmp.replace(path)
    return obj


def corpus(kind: str) -> list[PreparedPage]:
    """2000 pages; ``plain`` and ``augmented`` share layouts page by page."""
    if kind not in ("plain", "augmented"):
        raise ValueError(kind)

    def build():
        out = []
        t0 = time.time()
        for i in range(N_PAGES):
            p = PreparedPage(synthesize_page(SEED, i, augment=kind == "augmented"))
            _ = p.word_graph
            out.append(p)
            if i % 200 == 199:
                log.info("%s corpus: %d pages (%.0fs)", kind, i + 1, time.time() - t0)
        return out

    return _cached(f"corpus_{kind}_{_key(SEED, N_PAGES)}", build)


def dense_subset() -> list[PreparedPage]:
    """Two-column justified pages with the gutter near its minimum."""

    def build():
        out = []
        for i in range(DENSE_PAGES):
            base = sample_style(seed_sequence(SEED, "dense-style", i))
            rng = np.random.default_rng(seed_sequence(SEED, "dense-width", i))
            st = StyleSpec(**{**base.to_dict(), "column_count": 2, "alignment": "justified",
                              "column_width_fraction": float(rng.uniform(0.97, 0.985))})
            p = PreparedPage(synthesize_page(SEED + 1, i, style=st))
            _ = p.word_graph
            out.append(p)
        return out

    return _cached(f"dense_{_key(SEED, DENSE_PAGES)}", build)


def split(pages: list[PreparedPage]) -> tuple[list[PreparedPage], list[PreparedPage]]:
    return pages[:N_TRAIN], pages[N_TRAIN:]


def trained(kind: str, task: str):
    """(model, info) for ``task`` in {split, cluster} trained on ``kind`` pages."""
    cfg = SPLIT_CFG if task == "split" else CLUSTER_CFG
    key = _key(kind, task, SEED, N_PAGES, cfg.to_dict(), TRAIN.to_dict())
    path = CACHE / f"model_{kind}_{task}_{key}.bin"
    info_path = path.with_suffix(".json")
    if path.exists() and info_path.exists():
        return load_model(path), json.loads(info_path.read_text())
    tr, va = split(corpus(kind))
    if task == "split":
        s_tr, s_va = split_samples(tr), split_samples(va)
    else:
        s_tr, s_va = cluster_samples(tr), cluster_samples(va)
    t0 = time.time()
    res = train(init_model(cfg, SEED), s_tr, s_va, TRAIN)
    seconds = time.time() - t0
    probs = np.concatenate([np.ravel(forward(res.model, s.features, s.graph)) for s in s_va])
    pr = classification_pr(probs, np.concatenate([np.ravel(s.labels) for s in s_va]),
                           np.concatenate([np.ravel(s.weights) for s in s_va]))
    info = {"seconds": seconds, "best_epoch": res.best_epoch, "epochs_run": len(res.history),
            "precision": pr.precision, "recall": pr.recall, "history": res.history,
            "train_samples": len(s_tr), "val_samples": len(s_va)}
    CACHE.mkdir(parents=True, exist_ok=True)
    save_model(res.model, path)
    info_path.write_text(json.dumps(info, indent=1))
    return res.model, info


def end_to_end(pages: list[PreparedPage], split_model=None, cluster_model=None,
               method: str = "gcn") -> dict:
    """Paragraph-level summary of ``method`` over ``pages``."""
    rep = EvalReport()
    for k, p in enumerate(pages):
        page = p.page
        if method == "heuristic":
            ex = heuristic_paragraphs(page.words, page.raw_lines)
        else:
            ex = extract_paragraphs(page.words, page.raw_lines, split_model, cluster_model,
                                    word_graph=p.word_graph)
        gts = list(zip(page.gt_regions(), page.gt_line_counts()))
        rep.add([q.region for q in ex.paragraphs], gts, page.dont_care, k, fixed_only=not page.has_line_gt)
    return rep.summary()


RESULTS: list[tuple[int, str]] = []


def record(n: int, ok: bool, detail: str) -> None:
    """Log one criterion outcome for the end-of-run summary, then assert it."""
    RESULTS.append((n, f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"))
    print(RESULTS[-1][1], flush=True)
    assert ok, detail


if __name__ == "__main__":
    import sys

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    for arg in sys.argv[1:]:
        kind, task = arg.split(":")
        _, info = trained(kind, task)
        print(arg, {k: v for k, v in info.items() if k != "history"}, flush=True)
