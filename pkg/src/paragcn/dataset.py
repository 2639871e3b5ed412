"""Newline-delimited JSON datasets: a versioned header line, then one page per line."""
from __future__ import annotations

import json
from typing import Iterable, Iterator

import numpy as np

from .datagen.page import Page

FORMAT = "paragcn-dataset"
VERSION = 1


class DatasetError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _plain(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def page_to_record(page: Page, page_id: str | int | None = None) -> dict:
    rec = {
        "id": page_id,
        "image_size": [float(v) for v in page.image_size],
        "words": page.words.reshape(-1, 8).tolist(),
        "raw_lines": page.raw_lines,
        "gt_lines": page.gt_lines.reshape(-1, 8).tolist(),
        "gt_paragraphs": page.gt_paragraphs,
        "dont_care": [p.tolist() for p in page.dont_care],
        "has_line_gt": page.has_line_gt,
        "row_links": [list(x) for x in page.row_links],
        "meta": _plain(page.meta),
    }
    if page.word_line is not None:
        rec["word_line"] = page.word_line.tolist()
    if page.node_labels is not None:
        rec["node_labels"] = page.node_labels.tolist()
    return rec


def record_to_page(rec: dict) -> Page:
    try:
        page = Page(
            image_size=tuple(rec["image_size"]),
            words=np.asarray(rec["words"], np.float64).reshape(-1, 4, 2),
            raw_lines=rec["raw_lines"],
            gt_lines=np.asarray(rec["gt_lines"], np.float64).reshape(-1, 4, 2),
            gt_paragraphs=rec["gt_paragraphs"],
            dont_care=rec.get("dont_care", []),
            word_line=rec.get("word_line"),
            row_links=[tuple(x) for x in rec.get("row_links", [])],
            has_line_gt=bool(rec.get("has_line_gt", True)),
            node_labels=rec.get("node_labels"),
            meta=rec.get("meta", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetError(f"malformed page record {rec.get('id')!r}: {exc}") from exc
    page.validate()
    return page


def write_dataset(path, pages: Iterable[Page], header: dict | None = None,
                  ids: Iterable | None = None) -> int:
    pages = list(pages)
    ids = list(ids) if ids is not None else list(range(len(pages)))
    head = {"format": FORMAT, "version": VERSION, "count": len(pages), **_plain(header or {})}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dump(head) + "\n")
        for pid, page in zip(ids, pages):
            fh.write(_dump(page_to_record(page, pid)) + "\n")
    return len(pages)


def read_header(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    try:
        head = json.loads(first)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: header is not JSON") from exc
    if head.get("format") != FORMAT:
        raise DatasetError(f"{path}: not a {FORMAT} file")
    if head.get("version") != VERSION:
        raise DatasetError(f"{path}: version {head.get('version')}, expected {VERSION}")
    return head


def iter_dataset(path) -> Iterator[tuple[object, Page]]:
    head = read_header(path)
    n = 0
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                n += 1
                yield rec.get("id"), record_to_page(rec)
    if n != head.get("count", n):
        raise DatasetError(f"{path}: header says {head['count']} pages, found {n}")


def read_dataset(path) -> tuple[dict, list[Page], list]:
    head = read_header(path)
    ids, pages = [], []
    for pid, page in iter_dataset(path):
        ids.append(pid)
        pages.append(page)
    return head, pages, ids


def write_jsonl(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(_dump(_plain(r)) + "\n")
