"""Paragraph detection from OCR word boxes with graph convolutional networks."""
from __future__ import annotations

__version__ = "0.1.0"
