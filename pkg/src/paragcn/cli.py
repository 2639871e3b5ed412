"""Command-line entry point: ``paragcn <command> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from .datagen.augment import AugmentSpec, augment_page
from .datagen.ocr import OcrSpec
from .dataset import iter_dataset, read_dataset, write_dataset, write_jsonl
from .graphnet.io import load_model, save_model
from .graphnet.model import GcnConfig, init_model
from .graphnet.training import TrainConfig, train
from .heuristic import HeuristicParams, heuristic_paragraphs
from .ingest import ingest_files
from .metrics import EvalReport, classification_pr
from .pipeline import Extraction, Line, Paragraph, extract_paragraphs
from .plotting import plot_eval_summary, plot_history, render_overlay
from .prepare import PreparedPage, cluster_samples, split_samples, synthesize_page
from .rng import child_seed

log = logging.getLogger("paragcn")

DEFAULTS = {
    "seed": 0,
    "threads": 1,
    "count": 100,
    "augment": False,
    "jitter": OcrSpec.jitter,
    "p_merge": OcrSpec.p_merge,
    "p_break": OcrSpec.p_break,
    "table_probability": 0.0,
    "max_rotation_deg": 45.0,
    "max_corner_shift": AugmentSpec.max_corner_shift,
    "val_fraction": 0.2,
    "threshold": 0.5,
    "method": None,
    "pages": 5,
    **{f.name: f.default for f in fields(TrainConfig) if f.name not in ("seed", "dont_care_weight")},
    **{f.name: f.default for f in fields(GcnConfig) if f.name not in ("head_type", "input_width")},
    **{f.name: f.default for f in fields(HeuristicParams)},
}


def _bool(s: str) -> bool:
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {s!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="run seed (default 0)")
    p.add_argument("--out", required=True, help="output file or directory")
    p.add_argument("--threads", type=int, help="worker processes for per-page work (default 1)")
    p.add_argument("--config", help="JSON file of option overrides (flags win over it)")
    p.add_argument("--log-level", default="INFO")


def _train_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--val-fraction", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--patience", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--balance-classes", type=_bool)
    p.add_argument("--max-pos-weight", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--hidden-width", type=int)
    p.add_argument("--heads", type=int)
    p.add_argument("--pooling", choices=("average", "attention"))
    p.add_argument("--report", help="training report (JSONL); a loss-curve PNG is written next to it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="paragcn", description="Paragraph detection from OCR boxes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="synthesize a labelled dataset")
    _common(p)
    p.add_argument("--count", type=int)
    p.add_argument("--augment", type=_bool)
    p.add_argument("--jitter", type=float)
    p.add_argument("--p-merge", type=float)
    p.add_argument("--p-break", type=float)
    p.add_argument("--table-probability", type=float)
    p.add_argument("--max-rotation-deg", type=float)
    p.add_argument("--max-corner-shift", type=float)

    p = sub.add_parser("augment", help="apply projection + rotation to every page of a dataset")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--max-rotation-deg", type=float)
    p.add_argument("--max-corner-shift", type=float)

    p = sub.add_parser("ingest", help="import COCO-style layout annotations")
    _common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--mapping", required=True, help='JSON {category_id: "paragraph" | "dont_care"}')
    p.add_argument("--ocr", help="JSON {image_id: {words: [[8 coords]], lines: [[word ids]]}}")

    p = sub.add_parser("train-split", help="train the line splitting model")
    _common(p)
    _train_opts(p)

    p = sub.add_parser("train-cluster", help="train the line clustering model")
    _common(p)
    _train_opts(p)
    p.add_argument("--split-model", help="form training lines with this model instead of the labels")

    p = sub.add_parser("infer", help="extract paragraphs")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--split-model", required=True)
    p.add_argument("--cluster-model", required=True)
    p.add_argument("--threshold", type=float)

    p = sub.add_parser("eval", help="score paragraphs against ground truth")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--method", choices=("gcn", "heuristic", "both"))
    p.add_argument("--split-model")
    p.add_argument("--cluster-model")
    p.add_argument("--predictions", help="infer output to score instead of running a method")
    p.add_argument("--figures", help="directory for PNG figures (default: next to --out)")

    p = sub.add_parser("overlay", help="draw words, lines and paragraphs per page")
    _common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--split-model")
    p.add_argument("--cluster-model")
    p.add_argument("--method", choices=("gcn", "heuristic", "gt"))
    p.add_argument("--pages", type=int, help="number of pages to draw (default 5)")
    return ap


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = sorted(set(file_cfg) - set(cfg))
        if unknown:
            raise SystemExit(f"config file {args.config}: unknown keys {unknown}")
        cfg.update(file_cfg)
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command", "log_level"):
            cfg[k] = v
    return cfg


def _gen_one(job):
    seed, i, cfg = job
    ocr = OcrSpec(cfg["jitter"], cfg["p_merge"], cfg["p_break"])
    aug = AugmentSpec(math.radians(cfg["max_rotation_deg"]), cfg["max_corner_shift"])
    return synthesize_page(seed, i, cfg["augment"], ocr, cfg["table_probability"], augment_spec=aug)


def _map(fn, jobs, threads: int):
    if threads <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, jobs, chunksize=8))


def cmd_gen(cfg: dict) -> int:
    jobs = [(cfg["seed"], i, cfg) for i in range(cfg["count"])]
    pages = _map(_gen_one, jobs, cfg["threads"])
    header = {"generator": {k: cfg[k] for k in ("count", "augment", "jitter", "p_merge", "p_break",
                                                 "table_probability", "max_rotation_deg",
                                                 "max_corner_shift")},
              "seed": cfg["seed"], "command": "gen"}
    write_dataset(cfg["out"], pages, header)
    log.info("wrote %d pages to %s", len(pages), cfg["out"])
    return 0


def cmd_augment(cfg: dict) -> int:
    head, pages, ids = read_dataset(cfg["data"])
    out = []
    for i, page in enumerate(pages):
        spec = AugmentSpec(math.radians(cfg["max_rotation_deg"]), cfg["max_corner_shift"],
                           child_seed(cfg["seed"], "augment", i))
        out.append(augment_page(page, spec))
    header = {"generator": head.get("generator", {}), "source": str(cfg["data"]), "seed": cfg["seed"],
              "command": "augment", "augment": {"max_rotation_deg": cfg["max_rotation_deg"],
                                                "max_corner_shift": cfg["max_corner_shift"]}}
    write_dataset(cfg["out"], out, header, ids)
    return 0


def cmd_ingest(cfg: dict) -> int:
    res = ingest_files(cfg["annotations"], cfg["mapping"], cfg.get("ocr"))
    header = {"command": "ingest", "source": str(cfg["annotations"]),
              "diagnostics": dict(sorted(res.diagnostics.items()))}
    write_dataset(cfg["out"], res.pages, header, res.ids)
    log.info("ingested %d pages; diagnostics %s", len(res.pages), dict(res.diagnostics))
    return 0


def _holdout(n: int, frac: float) -> int:
    """Pages [0, cut) train, [cut, n) are held out."""
    return n - int(round(n * frac)) if n > 1 else n


def _load_prepared(path) -> list[PreparedPage]:
    return [PreparedPage(p) for _, p in iter_dataset(path)]


def _configs(cfg: dict, head: str, width: int) -> tuple[GcnConfig, TrainConfig]:
    g = GcnConfig(cfg["steps"], cfg["hidden_width"], cfg["heads"], cfg["pooling"], head, width)
    t = TrainConfig(**{f.name: cfg[f.name] for f in fields(TrainConfig)
                       if f.name not in ("seed", "dont_care_weight")}, seed=child_seed(cfg["seed"], "train", head))
    return g, t


def _train_common(cfg: dict, task: str) -> int:
    prepared = _load_prepared(cfg["data"])
    cut = _holdout(len(prepared), cfg["val_fraction"])
    if task == "split":
        gcfg, tcfg = _configs(cfg, "node_binary_pair", 29)
        samples_tr = split_samples([p for p in prepared[:cut] if p.page.has_line_gt])
        samples_va = split_samples([p for p in prepared[cut:] if p.page.has_line_gt])
    else:
        gcfg, tcfg = _configs(cfg, "edge_binary", 30)
        sm = load_model(cfg["split_model"], {"head_type": "node_binary_pair"}) if cfg.get("split_model") else None
        samples_tr = cluster_samples(prepared[:cut], sm)
        samples_va = cluster_samples(prepared[cut:], sm)
    model = init_model(gcfg, child_seed(cfg["seed"], "init", task))
    res = train(model, samples_tr, samples_va, tcfg)
    save_model(res.model, cfg["out"])
    from .graphnet.model import forward
    probs = [forward(res.model, s.features, s.graph) for s in samples_va]
    if probs:
        pr = classification_pr(np.concatenate(probs), np.concatenate([s.labels for s in samples_va]),
                               np.concatenate([s.weights for s in samples_va]))
        val = {"precision": pr.precision, "recall": pr.recall, "defined": pr.defined}
    else:
        val = {}
    report = cfg.get("report") or str(Path(cfg["out"]).with_suffix(".report.jsonl"))
    records = [{"kind": "config", "task": task, "model": gcfg.to_dict(), "train": tcfg.to_dict(),
                "train_pages": len(samples_tr), "val_pages": len(samples_va),
                "pos_weight": res.pos_weight}]
    records += [{"kind": "epoch", **h} for h in res.history]
    records.append({"kind": "summary", "best_epoch": res.best_epoch, "validation": val})
    write_jsonl(report, records)
    plot_history(res.history, str(Path(report).with_suffix(".png")), f"{task} model")
    log.info("%s model: best epoch %d, held-out %s", task, res.best_epoch, val)
    return 0


def _extraction_record(pid, ex: Extraction) -> dict:
    return {"id": pid,
            "lines": [ln.words for ln in ex.lines],
            "paragraphs": [p.lines for p in ex.paragraphs],
            "regions": [np.round(p.region, 6).tolist() for p in ex.paragraphs]}


def _heuristic_params(cfg: dict) -> HeuristicParams:
    return HeuristicParams(**{f.name: cfg[f.name] for f in fields(HeuristicParams)})


def _run_method(method: str, page, split_model, cluster_model, hp: HeuristicParams,
                threshold: float = 0.5) -> Extraction:
    if method == "heuristic":
        return heuristic_paragraphs(page.words, page.raw_lines, hp)
    return extract_paragraphs(page.words, page.raw_lines, split_model, cluster_model, threshold)


def _extract_job(job):
    method, page, sm, cm, hp, threshold = job
    return _run_method(method, page, sm, cm, hp, threshold)


def _models(cfg: dict):
    if not cfg.get("split_model") or not cfg.get("cluster_model"):
        raise SystemExit("--split-model and --cluster-model are required for the gcn method")
    return (load_model(cfg["split_model"], {"head_type": "node_binary_pair"}),
            load_model(cfg["cluster_model"], {"head_type": "edge_binary"}))


def cmd_infer(cfg: dict) -> int:
    sm, cm = _models(cfg)
    items = list(iter_dataset(cfg["data"]))
    hp = _heuristic_params(cfg)
    jobs = [("gcn", page, sm, cm, hp, cfg["threshold"]) for _, page in items]
    results = _map(_extract_job, jobs, cfg["threads"])
    write_jsonl(cfg["out"], [_extraction_record(pid, ex) for (pid, _), ex in zip(items, results)])
    return 0


def _score(report: EvalReport, pid, page, regions) -> dict:
    gts = list(zip(page.gt_regions(), page.gt_line_counts()))
    return report.add(regions, gts, page.dont_care, pid, fixed_only=not page.has_line_gt)


def cmd_eval(cfg: dict) -> int:
    method = cfg["method"] or "gcn"
    methods = ["gcn", "heuristic"] if method == "both" else [method]
    items = list(iter_dataset(cfg["data"]))
    regions: dict[str, list] = {}
    if cfg.get("predictions"):
        with open(cfg["predictions"], encoding="utf-8") as fh:
            preds = {json.dumps(r["id"]): r for r in map(json.loads, fh)}
        methods = ["predictions"]
        regions["predictions"] = [[np.asarray(r) for r in preds[json.dumps(pid)]["regions"]]
                                  for pid, _ in items]
    else:
        sm = cm = None
        if "gcn" in methods:
            sm, cm = _models(cfg)
        hp = _heuristic_params(cfg)
        for m in methods:
            jobs = [(m, page, sm, cm, hp, cfg["threshold"]) for _, page in items]
            regions[m] = [[p.region for p in ex.paragraphs]
                          for ex in _map(_extract_job, jobs, cfg["threads"])]
    reports = {m: EvalReport() for m in methods}
    records = [{"kind": "header", "format": "paragcn-eval", "version": 1,
                "data": str(cfg["data"]), "methods": methods}]
    for k, (pid, page) in enumerate(items):
        for m in methods:
            rec = _score(reports[m], pid, page, regions[m][k])
            records.append({"kind": "page", "method": m, **rec})
    summaries = {m: r.summary() for m, r in reports.items()}
    records += [{"kind": "aggregate", "method": m, **s} for m, s in summaries.items()]
    write_jsonl(cfg["out"], records)
    fig_dir = Path(cfg.get("figures") or Path(cfg["out"]).parent)
    fig_dir.mkdir(parents=True, exist_ok=True)
    plot_eval_summary(summaries, str(fig_dir / (Path(cfg["out"]).stem + "_pr.png")))
    for m, s in summaries.items():
        log.info("%s: F1var %.4f mAP %.4f F1@0.5 %.4f", m, s["f1_var"], s["map"], s["f1@0.50"])
    return 0


def cmd_overlay(cfg: dict) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    method = cfg.get("method") or ("gcn" if cfg.get("split_model") else "gt")
    sm = cm = None
    if method == "gcn":
        sm, cm = _models(cfg)
    hp = _heuristic_params(cfg)
    for k, (pid, page) in enumerate(iter_dataset(cfg["data"])):
        if k >= cfg["pages"]:
            break
        if method == "gt":
            lines = [Line([], q, 0.0) for q in page.gt_lines]
            paras = [Paragraph(p, r) for p, r in zip(page.gt_paragraphs, page.gt_regions())]
        else:
            ex = _run_method(method, page, sm, cm, hp, cfg["threshold"])
            lines, paras = ex.lines, ex.paragraphs
        render_overlay(page, str(out / f"page_{k:04d}.png"), lines, paras, title=f"{pid} ({method})")
    return 0


COMMANDS = {
    "gen": cmd_gen, "augment": cmd_augment, "ingest": cmd_ingest,
    "train-split": lambda c: _train_common(c, "split"),
    "train-cluster": lambda c: _train_common(c, "cluster"),
    "infer": cmd_infer, "eval": cmd_eval, "overlay": cmd_overlay,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = resolve_config(args)
    log.info("resolved config for %s: %s", args.command, json.dumps(cfg, sort_keys=True, default=str))
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
