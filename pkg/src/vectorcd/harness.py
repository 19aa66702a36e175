"""Evaluation metrics, experiment orchestration, and CSV output.

Edgemark scoring counts endpoint marks on shared adjacencies with marks
compared as arrow versus non-arrow (conflict marks never match); the
denominators are all predicted marks for precision and all ground-truth
marks for recall.  Structural Hamming distance counts adjacency
insertions/deletions plus mark changes on shared pairs.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .aggregation import TunableAggregationMap, adag, apply_map, c_ind_score, compute_report, fit_pca, make_weight_stacks
from .citests import CiConfig
from .data import Dataset
from .discovery import lag_expand, s2v, s2v2, vectorized_pc
from .graphs import ARROW, CONFLICT, MixedGraph, cpdag_of
from .synth import SavarSpec, VectorScmSpec, gen_savar, gen_vector_scm


@dataclass(frozen=True)
class Metrics:
    adj_precision: float
    adj_recall: float
    edgemark_precision: float
    edgemark_recall: float
    shd: int

    def as_dict(self) -> dict:
        return {
            "adj_precision": self.adj_precision,
            "adj_recall": self.adj_recall,
            "edgemark_precision": self.edgemark_precision,
            "edgemark_recall": self.edgemark_recall,
            "shd": self.shd,
        }


def _mark_class(mark: str) -> str:
    if mark == CONFLICT:
        return CONFLICT
    return "head" if mark == ARROW else "nonhead"


def evaluate_graph(pred: MixedGraph, truth_cpdag: MixedGraph) -> Metrics:
    """Adjacency and endpoint-mark precision/recall plus SHD.

    Empty predictions have precision 1 by convention; empty truths have
    recall 1.
    """
    if pred.n_nodes != truth_cpdag.n_nodes:
        raise ValueError("graphs must share the node count")
    pred_pairs = pred.skeleton_pairs()
    truth_pairs = truth_cpdag.skeleton_pairs()
    shared = pred_pairs & truth_pairs
    adj_p = 1.0 if not pred_pairs else len(shared) / len(pred_pairs)
    adj_r = 1.0 if not truth_pairs else len(shared) / len(truth_pairs)

    matches = 0
    for i, j in shared:
        pm = pred.edge_marks(i, j)
        tm = truth_cpdag.edge_marks(i, j)
        for side in range(2):
            pc, tc = _mark_class(pm[side]), _mark_class(tm[side])
            if CONFLICT in (pc, tc):
                continue
            if pc == tc:
                matches += 1
    em_p = 1.0 if not pred_pairs else matches / (2 * len(pred_pairs))
    em_r = 1.0 if not truth_pairs else matches / (2 * len(truth_pairs))

    shd = len(pred_pairs ^ truth_pairs)
    for i, j in shared:
        if pred.edge_marks(i, j) != truth_cpdag.edge_marks(i, j):
            shd += 1
    return Metrics(adj_p, adj_r, em_p, em_r, shd)


def restrict_to_present(graph: MixedGraph, lags: Sequence[int]) -> MixedGraph:
    """Drop edges whose endpoints both lie strictly in the past.

    Window-expanded discovery duplicates past-slice structure; scoring
    only the edges that touch the present slice compares methods on the
    part of the graph the ground truth pins down.
    """
    edges = [
        (i, j, mi, mj)
        for i, j, mi, mj in graph.edges()
        if lags[i] == 0 or lags[j] == 0
    ]
    return MixedGraph(graph.n_nodes, edges)


# ---------------------------------------------------------------------------
# experiment orchestration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    generator: dict
    methods: list[dict]
    ci: CiConfig
    repetitions: int = 100
    seed_base: int = 0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")
        if not self.methods:
            raise ValueError("need at least one method")

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        ci = CiConfig(**d.get("ci", {}))
        return cls(
            generator=d["generator"],
            methods=d["methods"],
            ci=ci,
            repetitions=d.get("repetitions", 100),
            seed_base=d.get("seed_base", 0),
        )


def _make_generator(gen: dict, seed: int):
    kind = gen.get("kind", "vector_scm")
    params = {k: v for k, v in gen.items() if k != "kind"}
    if kind == "vector_scm":
        spec = VectorScmSpec(**params, seed=seed)
        ds, truth, _micro = gen_vector_scm(spec)
        return ds, cpdag_of(truth), 0
    if kind == "savar":
        if "links" in params:
            params["links"] = tuple(tuple(l) for l in params["links"])
        if "autocorr" in params:
            params["autocorr"] = tuple(params["autocorr"])
        spec = SavarSpec(**params, seed=seed)
        ds, truth = gen_savar(spec)
        return ds, truth, 1
    raise ValueError(f"unknown generator kind {kind!r}")


_METHOD_ALIASES = {"component_s2v": "s2v", "component_s2v2": "s2v2"}


def _run_method(method: dict, ds: Dataset, cfg: CiConfig, tau_max: int):
    """Returns (graph, extra metric dict)."""
    name = _METHOD_ALIASES.get(method["name"], method["name"])
    extras: dict[str, float] = {}
    view = lag_expand(ds, tau_max) if tau_max else ds
    if name == "vec":
        res = vectorized_pc(view, cfg)
        return res.graph, extras
    if name in ("avg", "pca"):
        if name == "avg":
            mapping = TunableAggregationMap(
                "weighted_average",
                (1,) * ds.n_vars,
                weights=make_weight_stacks(ds.widths, seed=cfg.rng_seed),
            )
        else:
            mapping = fit_pca(ds, [1] * ds.n_vars)
        z = apply_map(mapping, ds)
        z_view = lag_expand(z, tau_max) if tau_max else z
        res = vectorized_pc(z_view, cfg)
        if method.get("score_c_ind"):
            part = c_ind_score(view, res, mapping, cfg)
            extras["c_ind"] = part.score
        return res.graph, extras
    if name == "s2v":
        return s2v(view, cfg, method.get("edge_agg", "majority")), extras
    if name == "s2v2":
        return s2v2(view, cfg), extras
    if name == "adag":
        out = adag(
            ds,
            cfg,
            map_kind=method.get("map", "pca"),
            q=method.get("q", "c_ind"),
            alpha_q=method.get("alpha_q", 0.8),
            tau_max=tau_max,
            m_cap=method.get("m_cap"),
        )
        extras["final_m"] = float(max(out.m))
        extras["q_score"] = out.trace[-1]["score"]
        return out.graph, extras
    raise ValueError(f"unknown method {name!r}")


def method_label(method: dict) -> str:
    name = _METHOD_ALIASES.get(method["name"], method["name"])
    if name == "adag":
        return f"adag_{method.get('map', 'pca')}_{method.get('q', 'c_ind')}"
    if name == "s2v":
        return f"s2v_{method.get('edge_agg', 'majority')}"
    return name


def _one_repetition(cfg: ExperimentConfig, rep: int):
    seed = cfg.seed_base + rep
    ds, truth, tau_max = _make_generator(cfg.generator, seed)
    ci = CiConfig(
        alpha=cfg.ci.alpha,
        test_kind=cfg.ci.test_kind,
        bootstrap_reps=cfg.ci.bootstrap_reps,
        rng_seed=seed,
    )
    rows = []
    for method in cfg.methods:
        label = method_label(method)
        t0 = time.perf_counter()
        graph, extras = _run_method(method, ds, ci, tau_max)
        elapsed = time.perf_counter() - t0
        pred, target = graph, truth
        if tau_max:
            lags = lag_expand(ds, tau_max).lags
            pred = restrict_to_present(graph, lags)
            target = restrict_to_present(truth, lags)
        metrics = evaluate_graph(pred, target)
        for metric, value in {**metrics.as_dict(), **extras}.items():
            rows.append(
                {
                    "rep": rep,
                    "method": label,
                    "metric": metric,
                    "value": float(value),
                    "seconds": elapsed,
                }
            )
    return rows


def pool_size() -> int:
    cap = os.environ.get("VECTORCD_THREADS")
    if cap:
        return max(1, int(cap))
    return 1


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Run every repetition and method; aggregate rows sorted by rep.

    Individual repetition failures are recorded (metric 'failed') rather
    than fatal; the run errors out only past a 20% failure rate.
    """
    rows: list[dict] = []
    failures = 0
    workers = pool_size()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _safe_rep(cfg, r), range(cfg.repetitions)))
    else:
        results = [_safe_rep(cfg, r) for r in range(cfg.repetitions)]
    for rep, outcome in enumerate(results):
        if isinstance(outcome, Exception):
            failures += 1
            rows.append(
                {"rep": rep, "method": "-", "metric": "failed", "value": 1.0, "seconds": 0.0}
            )
        else:
            rows.extend(outcome)
    if failures > 0.2 * cfg.repetitions:
        raise RuntimeError(f"{failures}/{cfg.repetitions} repetitions failed")
    return rows


def _safe_rep(cfg: ExperimentConfig, rep: int):
    try:
        return _one_repetition(cfg, rep)
    except Exception as exc:  # recorded, not fatal
        return exc


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

RECORD_COLUMNS = ("rep", "method", "metric", "value", "seconds")


def emit_csv(records: list[dict], path: str | Path) -> Path:
    """Write the per-repetition records with locale-independent decimals."""
    path = Path(path)
    lines = [",".join(RECORD_COLUMNS)]
    for row in records:
        lines.append(
            f"{row['rep']},{row['method']},{row['metric']},"
            f"{row['value']:.10g},{row['seconds']:.6g}"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def read_records_csv(path: str | Path) -> list[dict]:
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != ",".join(RECORD_COLUMNS):
        raise ValueError("unexpected records header")
    out = []
    for ln in lines[1:]:
        rep, method, metric, value, seconds = ln.split(",")
        out.append(
            {
                "rep": int(rep),
                "method": method,
                "metric": metric,
                "value": float(value),
                "seconds": float(seconds),
            }
        )
    return out


def summarize(records: list[dict]) -> list[dict]:
    """Mean and standard error per (method, metric)."""
    groups: dict[tuple[str, str], list[float]] = {}
    for row in records:
        groups.setdefault((row["method"], row["metric"]), []).append(row["value"])
    out = []
    for (method, metric), values in sorted(groups.items()):
        arr = np.asarray(values)
        mean = float(arr.mean())
        stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out.append(
            {
                "method": method,
                "metric": metric,
                "mean": mean,
                "stderr": stderr,
                "count": len(arr),
            }
        )
    return out


def emit_summary_csv(records: list[dict], path: str | Path, extra_cols: dict | None = None) -> Path:
    path = Path(path)
    extra_cols = extra_cols or {}
    header = list(extra_cols) + ["method", "metric", "mean", "stderr", "count"]
    lines = [",".join(header)]
    for row in summarize(records):
        prefix = [f"{v:.10g}" if isinstance(v, float) else str(v) for v in extra_cols.values()]
        lines.append(
            ",".join(
                prefix
                + [
                    row["method"],
                    row["metric"],
                    f"{row['mean']:.10g}",
                    f"{row['stderr']:.10g}",
                    str(row["count"]),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n")
    return path
