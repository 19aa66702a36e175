import json
import subprocess
import sys
from pathlib import Path

import pytest

from vectorcd_plots import MissingColumnError, PlotSpec, render

ARTIFACTS = Path(__file__).resolve().parents[2] / "artifacts"

SUMMARY_HEADER = "symmetry,method,metric,mean,stderr,count"


def synthesize_sweep_csv(path: Path, methods=("avg", "vec"), with_c_ind=True):
    """Stand-in with the exact schema the harness sweep summaries use."""
    lines = [SUMMARY_HEADER]
    for i, sym in enumerate((0.0, 0.5, 1.0)):
        for m in methods:
            base = 0.95 - (0.3 * sym if m == "avg" else 0.0)
            lines.append(f"{sym},{m},adj_recall,{base:.4f},0.01,100")
            lines.append(f"{sym},{m},adj_precision,{base - 0.05:.4f},0.012,100")
            if with_c_ind and m == "avg":
                lines.append(f"{sym},{m},c_ind,{0.9 - 0.2 * sym:.4f},0.008,100")
    path.write_text("\n".join(lines) + "\n")
    return path


def sweep_csv(tmp_path: Path, name: str) -> Path:
    real = ARTIFACTS / name
    if real.exists():
        return real
    return synthesize_sweep_csv(tmp_path / name)


class TestRender:
    def test_error_bar_layout_from_sweep_summary(self, tmp_path):
        src = sweep_csv(tmp_path, "criterion4_summary.csv")
        out = tmp_path / "comparison.png"
        spec = PlotSpec(
            kind="method_comparison",
            inputs=(str(src),),
            out=str(out),
            x_column="symmetry",
            metrics=("adj_recall",),
            x_label="coefficient symmetry",
            y_label="adjacency recall",
        )
        assert render(spec) == out
        assert out.stat().st_size > 2000

    def test_dual_axis_layout_from_sweep_summary(self, tmp_path):
        src = sweep_csv(tmp_path, "criterion6_summary.csv")
        out = tmp_path / "dual.png"
        spec = PlotSpec(
            kind="score_vs_recall",
            inputs=(str(src),),
            out=str(out),
            x_column="symmetry",
            methods=("avg",),
            left_metrics=("c_ind",),
            right_metrics=("adj_recall",),
        )
        assert render(spec) == out
        assert out.stat().st_size > 2000

    def test_deterministic_bytes(self, tmp_path):
        src = sweep_csv(tmp_path, "criterion4_summary.csv")
        spec_a = PlotSpec(
            kind="method_comparison",
            inputs=(str(src),),
            out=str(tmp_path / "a.png"),
            x_column="symmetry",
        )
        spec_b = PlotSpec(
            kind="method_comparison",
            inputs=(str(src),),
            out=str(tmp_path / "b.png"),
            x_column="symmetry",
        )
        a = render(spec_a).read_bytes()
        b = render(spec_b).read_bytes()
        assert a == b

    def test_deterministic_svg(self, tmp_path):
        src = sweep_csv(tmp_path, "criterion6_summary.csv")
        outs = []
        for name in ("a.svg", "b.svg"):
            spec = PlotSpec(
                kind="score_vs_recall",
                inputs=(str(src),),
                out=str(tmp_path / name),
                x_column="symmetry",
                left_metrics=("c_ind",),
                right_metrics=("adj_recall",),
            )
            outs.append(render(spec).read_bytes())
        assert outs[0] == outs[1]

    def test_single_point_input(self, tmp_path):
        src = tmp_path / "one.csv"
        src.write_text(
            "method,metric,mean,stderr,count\nvec,adj_recall,0.9,0.02,100\n"
        )
        out = tmp_path / "one.png"
        spec = PlotSpec(kind="ci_calibration", inputs=(str(src),), out=str(out))
        assert render(spec).exists()

    def test_missing_column_is_named(self, tmp_path):
        src = tmp_path / "bad.csv"
        src.write_text("method,metric,mean,stderr,count\nvec,adj_recall,0.9,0.02,100\n")
        spec = PlotSpec(
            kind="method_comparison",
            inputs=(str(src),),
            out=str(tmp_path / "x.png"),
            x_column="symmetry",
        )
        with pytest.raises(MissingColumnError) as err:
            render(spec)
        assert "symmetry" in str(err.value)

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            PlotSpec(kind="pie", inputs=("x.csv",), out="y.png")


class TestCli:
    def test_render_subcommand(self, tmp_path):
        src = synthesize_sweep_csv(tmp_path / "s.csv")
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps(
                {
                    "kind": "method_comparison",
                    "inputs": [str(src)],
                    "out": str(tmp_path / "cli.png"),
                    "x_column": "symmetry",
                    "metrics": ["adj_recall"],
                }
            )
        )
        proc = subprocess.run(
            [sys.executable, "-m", "vectorcd_plots.cli", "render", "--spec", str(spec_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "cli.png").exists()
