"""Render benchmark figures from harness summary CSVs.

The renderer consumes only the summary files the harness emits
(method,metric,mean,stderr,count rows, optionally prefixed by sweep
columns such as a symmetry value) and never recomputes statistics.
Output is deterministic for identical inputs: fixed style, no embedded
timestamps.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "vectorcd-plots"

FIGURE_KINDS = ("method_comparison", "score_vs_recall", "adag_vs_vec", "ci_calibration")

_STYLE = {
    "color_cycle": ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"),
    "marker_cycle": ("o", "s", "^", "D", "v", "P"),
    "capsize": 3.0,
}


class MissingColumnError(KeyError):
    """A referenced column is absent from the input CSV."""

    def __init__(self, column: str, path: str):
        super().__init__(column)
        self.column = column
        self.path = path

    def __str__(self):
        return f"column {self.column!r} missing from {self.path}"


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[str, ...]
    out: str
    x_column: str | None = None
    methods: tuple[str, ...] = ()
    metrics: tuple[str, ...] = ("adj_recall",)
    left_metrics: tuple[str, ...] = ()
    right_metrics: tuple[str, ...] = ()
    x_label: str = ""
    y_label: str = ""
    right_label: str = ""
    title: str = ""

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV required")

    @classmethod
    def from_json_dict(cls, d: dict) -> "PlotSpec":
        tup = lambda key, default=(): tuple(d.get(key, default))
        return cls(
            kind=d["kind"],
            inputs=tuple(d["inputs"]),
            out=d["out"],
            x_column=d.get("x_column"),
            methods=tup("methods"),
            metrics=tup("metrics", ("adj_recall",)),
            left_metrics=tup("left_metrics"),
            right_metrics=tup("right_metrics"),
            x_label=d.get("x_label", ""),
            y_label=d.get("y_label", ""),
            right_label=d.get("right_label", ""),
            title=d.get("title", ""),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "PlotSpec":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def load_summary(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append(dict(row))
    if not rows:
        raise ValueError(f"no rows in {path}")
    return rows


def _require(rows: list[dict], column: str, path: str) -> None:
    if column not in rows[0]:
        raise MissingColumnError(column, path)


def _series(rows, x_column, method, metric, path):
    """Sorted (x, mean, stderr) triples for one method/metric pair."""
    _require(rows, "method", path)
    _require(rows, "metric", path)
    _require(rows, "mean", path)
    _require(rows, "stderr", path)
    if x_column is not None:
        _require(rows, x_column, path)
    pts = []
    for row in rows:
        if row["method"] != method or row["metric"] != metric:
            continue
        x = float(row[x_column]) if x_column is not None else 0.0
        pts.append((x, float(row["mean"]), float(row["stderr"])))
    pts.sort()
    return pts


def _methods_in(rows, spec: PlotSpec):
    if spec.methods:
        return list(spec.methods)
    seen = []
    for row in rows:
        if row["method"] not in seen and row["method"] != "-":
            seen.append(row["method"])
    return seen


def _errorbar(ax, pts, label, idx, linestyle="-"):
    if not pts:
        return
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    es = [p[2] for p in pts]
    ax.errorbar(
        xs,
        ys,
        yerr=es,
        label=label,
        color=_STYLE["color_cycle"][idx % len(_STYLE["color_cycle"])],
        marker=_STYLE["marker_cycle"][idx % len(_STYLE["marker_cycle"])],
        capsize=_STYLE["capsize"],
        linestyle=linestyle,
    )


def render(spec: PlotSpec) -> Path:
    """Draw the figure described by the spec and return the output path."""
    rows: list[dict] = []
    for path in spec.inputs:
        rows.extend(load_summary(path))
    src = spec.inputs[0]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if spec.kind in ("method_comparison", "ci_calibration", "adag_vs_vec"):
            idx = 0
            for method in _methods_in(rows, spec):
                for metric in spec.metrics:
                    pts = _series(rows, spec.x_column, method, metric, src)
                    label = method if len(spec.metrics) == 1 else f"{method}:{metric}"
                    _errorbar(ax, pts, label, idx)
                    idx += 1
            ax.set_ylabel(spec.y_label or "/".join(spec.metrics))
        else:  # score_vs_recall: dual axis
            left = spec.left_metrics or ("c_ind",)
            right = spec.right_metrics or ("adj_recall",)
            right_ax = ax.twinx()
            idx = 0
            for method in _methods_in(rows, spec):
                for metric in left:
                    pts = _series(rows, spec.x_column, method, metric, src)
                    _errorbar(ax, pts, f"{method}:{metric}", idx)
                    idx += 1
                for metric in right:
                    pts = _series(rows, spec.x_column, method, metric, src)
                    _errorbar(right_ax, pts, f"{method}:{metric}", idx, linestyle="--")
                    idx += 1
            ax.set_ylabel(spec.y_label or "/".join(left))
            right_ax.set_ylabel(spec.right_label or "/".join(right))
            handles_l, labels_l = ax.get_legend_handles_labels()
            handles_r, labels_r = right_ax.get_legend_handles_labels()
            ax.legend(handles_l + handles_r, labels_l + labels_r, fontsize=8)
        if spec.kind != "score_vs_recall":
            if ax.get_legend_handles_labels()[0]:
                ax.legend(fontsize=8)
        ax.set_xlabel(spec.x_label or (spec.x_column or ""))
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if out.suffix == ".svg" else {}
        fig.savefig(out, dpi=120, metadata=metadata)
        return out
    finally:
        plt.close(fig)
