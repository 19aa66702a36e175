"""Batch rendering of benchmark figures from harness summary CSVs."""

from .render import FIGURE_KINDS, MissingColumnError, PlotSpec, load_summary, render

__all__ = ["FIGURE_KINDS", "MissingColumnError", "PlotSpec", "load_summary", "render"]

__version__ = "0.1.0"
