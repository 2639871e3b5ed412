"""Random page styles: the knobs the layout synthesizer varies."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

SEPARATORS = ("indent", "vertical_space")
ALIGNMENTS = ("left", "right", "center", "justified")


@dataclass(frozen=True)
class StyleSpec:
    column_count: int = 1
    paragraph_separator: str = "indent"
    alignment: str = "left"
    column_width_fraction: float = 0.94   # text share of each column pitch
    left_margin_fraction: float = 0.08
    line_height_factor: float = 1.3
    font_scale: float = 1.0
    list_item_probability: float = 0.1
    title_probability: float = 0.3
    table_probability: float = 0.0

    def __post_init__(self):
        if self.column_count not in (1, 2, 3):
            raise ValueError("column_count: must be 1, 2 or 3")
        if self.paragraph_separator not in SEPARATORS:
            raise ValueError(f"paragraph_separator: expected one of {SEPARATORS}")
        if self.alignment not in ALIGNMENTS:
            raise ValueError(f"alignment: expected one of {ALIGNMENTS}")
        for name in ("column_width_fraction", "left_margin_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name}: must lie in (0, 1], got {v}")
        if not self.font_scale > 0:
            raise ValueError("font_scale: must be > 0")
        if self.left_margin_fraction >= 0.4:
            raise ValueError("left_margin_fraction: must be < 0.4")
        if self.line_height_factor < 1:
            raise ValueError("line_height_factor: must be >= 1")
        for name in ("list_item_probability", "title_probability", "table_probability"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name}: must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def sample_style(seed, table_probability: float = 0.0) -> StyleSpec:
    """Draw every field independently from a seeded generator.

    ``seed`` may be an int or a :class:`numpy.random.SeedSequence`.
    """
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence([int(seed), 0x5354])
    rng = np.random.default_rng(ss)
    return StyleSpec(
        column_count=int(rng.choice([1, 2, 3], p=[0.35, 0.45, 0.2])),
        paragraph_separator=str(rng.choice(SEPARATORS)),
        alignment=str(rng.choice(ALIGNMENTS, p=[0.35, 0.1, 0.1, 0.45])),
        column_width_fraction=float(rng.uniform(0.86, 0.985)),
        left_margin_fraction=float(rng.uniform(0.04, 0.14)),
        line_height_factor=float(rng.uniform(1.15, 1.7)),
        font_scale=float(rng.uniform(0.8, 1.3)),
        list_item_probability=float(rng.uniform(0.0, 0.25)),
        title_probability=0.3,
        table_probability=float(table_probability),
    )
