import json
import subprocess
import sys

import numpy as np
import pytest

from vectorcd.cli import main
from vectorcd.data import load_csv, save_csv
from vectorcd.graphs import MixedGraph


def run_cli(*argv):
    return main(list(argv))


class TestSimulate:
    def test_vector_scm_outputs(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            json.dumps({"kind": "vector_scm", "d_macro": 3, "d_micro": 2, "n": 120, "seed": 3})
        )
        out = tmp_path / "sim"
        assert run_cli("simulate", "--spec", str(spec), "--out", str(out)) == 0
        ds = load_csv(out / "dataset.csv")
        assert ds.X.shape == (120, 6)
        assert ds.widths == (2, 2, 2)
        truth = MixedGraph.from_text((out / "truth.graph").read_text())
        assert truth.n_nodes == 3

    def test_savar_spec(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            json.dumps(
                {
                    "kind": "savar",
                    "n_modes": 2,
                    "grid_side": 3,
                    "links": [[0, 1, 0.4]],
                    "autocorr": [0.3, 0.3],
                    "n": 80,
                    "seed": 1,
                }
            )
        )
        out = tmp_path / "savar"
        assert run_cli("simulate", "--spec", str(spec), "--out", str(out)) == 0
        ds = load_csv(out / "dataset.csv")
        assert ds.X.shape == (80, 18)
        truth = MixedGraph.from_text((out / "truth.graph").read_text())
        assert truth.n_nodes == 4


class TestDiscoverAndScores:
    @pytest.fixture
    def sim_dir(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            json.dumps(
                {
                    "kind": "vector_scm",
                    "d_macro": 3,
                    "d_micro": 2,
                    "internal_kind": "mrf",
                    "ext_density": 1.0,
                    "n": 600,
                    "seed": 5,
                }
            )
        )
        out = tmp_path / "sim"
        run_cli("simulate", "--spec", str(spec), "--out", str(out))
        return tmp_path, out

    def test_discover_writes_graph_and_log(self, sim_dir):
        tmp_path, sim = sim_dir
        out = tmp_path / "disc"
        code = run_cli(
            "discover",
            "--data", str(sim / "dataset.csv"),
            "--method", "vec",
            "--alpha", "0.05",
            "--test", "gcm",
            "--out", str(out),
        )
        assert code == 0
        g = MixedGraph.from_text((out / "graph.txt").read_text())
        assert g.n_nodes == 3
        log_lines = (out / "log.jsonl").read_text().strip().splitlines()
        assert len(log_lines) >= 3
        rec = json.loads(log_lines[0])
        assert set(rec) >= {"pair", "cond", "p_value", "decided_independent"}

    def test_scores_pipeline(self, sim_dir):
        tmp_path, sim = sim_dir
        disc = tmp_path / "avg_run"
        run_cli(
            "discover",
            "--data", str(sim / "dataset.csv"),
            "--method", "avg",
            "--alpha", "0.05",
            "--test", "gcm",
            "--out", str(disc),
        )
        assert (disc / "map.json").exists()
        score_out = tmp_path / "scored"
        code = run_cli(
            "scores",
            "--data", str(sim / "dataset.csv"),
            "--agg-result", str(disc),
            "--map", str(disc / "map.json"),
            "--alpha", "0.05",
            "--out", str(score_out),
        )
        assert code == 0
        report = json.loads((score_out / "report.json").read_text())
        assert 0.0 <= report["c_ind"] <= 1.0
        assert report["ac"] == pytest.approx((report["c_ind"] + report["c_dep"]) / 2)

    @pytest.mark.parametrize("method", ["s2v", "s2v2"])
    def test_component_methods(self, sim_dir, method):
        tmp_path, sim = sim_dir
        out = tmp_path / method
        code = run_cli(
            "discover",
            "--data", str(sim / "dataset.csv"),
            "--method", method,
            "--alpha", "0.05",
            "--test", "parcorr",
            "--out", str(out),
        )
        assert code == 0
        g = MixedGraph.from_text((out / "graph.txt").read_text())
        assert g.n_nodes == 3


class TestAdagCommand:
    def test_adag_outputs(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            json.dumps(
                {
                    "kind": "vector_scm",
                    "d_macro": 3,
                    "d_micro": 2,
                    "internal_kind": "mrf",
                    "ext_density": 1.0,
                    "n": 500,
                    "seed": 9,
                }
            )
        )
        sim = tmp_path / "sim"
        run_cli("simulate", "--spec", str(spec), "--out", str(sim))
        out = tmp_path / "adag"
        code = run_cli(
            "adag",
            "--data", str(sim / "dataset.csv"),
            "--score", "cind",
            "--target", "0.8",
            "--map", "pca",
            "--alpha", "0.05",
            "--out", str(out),
        )
        assert code == 0
        assert (out / "graph.txt").exists()
        report = json.loads((out / "report.json").read_text())
        assert "c_ind" in report
        trace = (out / "trace.csv").read_text().splitlines()
        assert trace[0] == "iteration,m,score,edges"
        assert len(trace) >= 2


class TestBench:
    def test_bench_writes_records_and_summary(self, tmp_path):
        config = tmp_path / "bench.json"
        config.write_text(
            json.dumps(
                {
                    "generator": {
                        "kind": "vector_scm",
                        "d_macro": 3,
                        "d_micro": 2,
                        "internal_kind": "mrf",
                        "n": 250,
                    },
                    "methods": [{"name": "avg"}, {"name": "vec"}],
                    "ci": {"alpha": 0.05, "test_kind": "gcm", "bootstrap_reps": 199},
                    "repetitions": 2,
                    "seed_base": 0,
                }
            )
        )
        out = tmp_path / "bench"
        assert run_cli("bench", "--config", str(config), "--out", str(out)) == 0
        records = (out / "records.csv").read_text().splitlines()
        assert records[0] == "rep,method,metric,value,seconds"
        assert len(records) > 10
        summary = (out / "summary.csv").read_text().splitlines()
        assert summary[0] == "method,metric,mean,stderr,count"


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"d_macro": 2, "d_micro": 2, "n": 60, "seed": 0}))
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "vectorcd.cli",
                "simulate",
                "--spec", str(spec),
                "--out", str(tmp_path / "o"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "o" / "dataset.csv").exists()
