from .augment import AugmentSpec, augment_page
from .labels import (ClusterLabels, allocate, cut_lines, derive_cluster_labels, derive_split_labels,
                     line_quads, split_by_labels)
from .layout import PAGE_SIZE, generate_page
from .ocr import OcrSpec, order_along_axis, simulate_ocr
from .page import Page
from .style import StyleSpec, sample_style

__all__ = [
    "AugmentSpec", "ClusterLabels", "OcrSpec", "PAGE_SIZE", "Page", "StyleSpec", "allocate",
    "augment_page", "cut_lines", "derive_cluster_labels", "derive_split_labels", "generate_page",
    "line_quads", "order_along_axis", "sample_style", "simulate_ocr", "split_by_labels",
]
