"""Import COCO-style layout annotations (e.g. PubLayNet) as pages.

Text-like categories become paragraph ground truth, everything else
becomes don't-care.  The id -> role mapping is supplied by the user since
category ids are dataset metadata.  Such pages carry no line-level ground
truth.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .datagen.page import Page
from .geometry.polygon import convex_hull, polygon_area

log = logging.getLogger(__name__)

ROLES = ("paragraph", "dont_care")


@dataclass
class IngestResult:
    pages: list[Page]
    ids: list
    diagnostics: Counter = field(default_factory=Counter)


def load_mapping(obj) -> dict[int, str]:
    """Parse ``{category_id: "paragraph" | "dont_care"}`` (keys may be strings)."""
    if not isinstance(obj, dict):
        raise ValueError("category mapping must be an object of id -> role")
    out = {}
    for k, v in obj.items():
        if v not in ROLES:
            raise ValueError(f"category {k}: role must be one of {ROLES}, got {v!r}")
        out[int(k)] = v
    return out


def _polygon(ann: dict) -> np.ndarray | None:
    seg = ann.get("segmentation")
    if isinstance(seg, list) and seg and isinstance(seg[0], list):
        pts = np.concatenate([np.asarray(s, np.float64).reshape(-1, 2) for s in seg])
    elif "bbox" in ann:
        x, y, w, h = (float(v) for v in ann["bbox"])
        pts = np.array([[x, y], [x + w, y], [x + w, y + h], [x, y + h]])
    else:
        return None
    if len(pts) < 3 or not np.all(np.isfinite(pts)):
        return None
    hull = convex_hull(pts)
    if len(hull) < 3 or polygon_area(hull) <= 0:
        return None
    return hull


def _ocr_for(ocr: dict | None, image: dict):
    if not ocr:
        return np.zeros((0, 4, 2)), []
    entry = ocr.get(str(image["id"])) or ocr.get(image.get("file_name", ""))
    if entry is None:
        return np.zeros((0, 4, 2)), []
    words = np.asarray(entry.get("words", []), np.float64).reshape(-1, 4, 2)
    lines = entry.get("lines")
    if lines is None:
        lines = [[i] for i in range(len(words))]
    return words, lines


def ingest_coco_layout(annotations: dict, mapping: dict, ocr: dict | None = None) -> IngestResult:
    """Convert one COCO document into pages, one per image.

    Unknown category ids raise; polygons with fewer than 3 points and
    malformed annotations are skipped and counted in ``diagnostics``.
    """
    roles = load_mapping(mapping)
    used = {a.get("category_id") for a in annotations.get("annotations", []) if isinstance(a, dict)}
    unknown = sorted(c for c in used if c not in roles and c is not None)
    if unknown:
        raise ValueError(f"unknown category ids {unknown}; add them to the mapping")
    by_image: dict = {}
    diag: Counter = Counter()
    for ann in annotations.get("annotations", []):
        if not isinstance(ann, dict) or "image_id" not in ann or "category_id" not in ann:
            diag["malformed_annotation"] += 1
            continue
        by_image.setdefault(ann["image_id"], []).append(ann)
    pages, ids = [], []
    for image in annotations.get("images", []):
        try:
            size = (float(image["width"]), float(image["height"]))
            img_id = image["id"]
        except (KeyError, TypeError, ValueError):
            diag["malformed_image"] += 1
            continue
        regions, dont_care = [], []
        for ann in by_image.get(img_id, []):
            poly = _polygon(ann)
            if poly is None:
                diag["invalid_polygon"] += 1
                continue
            (regions if roles[ann["category_id"]] == "paragraph" else dont_care).append(poly)
        words, lines = _ocr_for(ocr, image)
        page = Page(size, words, lines, np.zeros((0, 4, 2)), [], dont_care=dont_care,
                    has_line_gt=False,
                    meta={"paragraph_regions": [r.tolist() for r in regions],
                          "file_name": image.get("file_name"), "source": "coco"})
        try:
            page.validate()
        except ValueError as exc:
            diag["malformed_image"] += 1
            log.warning("image %s skipped: %s", img_id, exc)
            continue
        pages.append(page)
        ids.append(img_id)
    for k, v in sorted(diag.items()):
        log.info("ingest: %d %s", v, k)
    return IngestResult(pages, ids, diag)


def ingest_files(annotation_path, mapping_path, ocr_path=None) -> IngestResult:
    with open(annotation_path, encoding="utf-8") as fh:
        ann = json.load(fh)
    with open(mapping_path, encoding="utf-8") as fh:
        mapping = json.load(fh)
    ocr = None
    if ocr_path:
        with open(ocr_path, encoding="utf-8") as fh:
            ocr = json.load(fh)
    return ingest_coco_layout(ann, mapping, ocr)
