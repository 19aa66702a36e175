"""Command-line interface.

Subcommands: simulate (synthetic data + ground truth), discover (one
discovery run), adag (adaptive aggregation run), scores (consistency
report for an existing aggregate run), bench (repeated comparison
experiments with CSV output).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aggregation import (
    TunableAggregationMap,
    adag,
    apply_map,
    compute_report,
    fit_pca,
    make_weight_stacks,
)
from .citests import CiConfig
from .data import load_csv, save_csv
from .discovery import DiscoveryResult, s2v, s2v2, vectorized_pc
from .graphs import MixedGraph
from .harness import ExperimentConfig, emit_csv, emit_summary_csv, run_experiment
from .synth import (
    SavarSpec,
    VectorScmSpec,
    gen_confounder_xyz,
    gen_counterexample,
    gen_savar,
    gen_vector_scm,
)


def _cmd_simulate(args) -> int:
    spec = json.loads(Path(args.spec).read_text())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = spec.pop("kind", "vector_scm")
    if kind == "vector_scm":
        ds, truth, micro = gen_vector_scm(VectorScmSpec(**spec))
        (out / "truth.graph").write_text(truth.to_text())
        (out / "truth_micro.graph").write_text(micro.to_text())
    elif kind == "savar":
        if "links" in spec:
            spec["links"] = tuple(tuple(l) for l in spec["links"])
        if "autocorr" in spec:
            spec["autocorr"] = tuple(spec["autocorr"])
        ds, truth = gen_savar(SavarSpec(**spec))
        (out / "truth.graph").write_text(truth.to_text())
    elif kind == "confounder":
        spec["dims"] = tuple(spec["dims"])
        ds = gen_confounder_xyz(**spec)
        truth = MixedGraph(3, [(2, 0, "-", ">"), (2, 1, "-", ">")])
        (out / "truth.graph").write_text(truth.to_text())
    elif kind == "counterexample":
        ds, mapping = gen_counterexample(**spec)
        (out / "map.json").write_text(json.dumps(mapping.to_json_dict()))
    else:
        print(f"unknown generator kind {kind!r}", file=sys.stderr)
        return 2
    save_csv(ds, out / "dataset.csv")
    print(f"wrote {out / 'dataset.csv'}")
    return 0


def _ci_config(args, seed: int = 0) -> CiConfig:
    return CiConfig(
        alpha=args.alpha,
        test_kind=getattr(args, "test", "gcm"),
        bootstrap_reps=getattr(args, "bootstrap", 499),
        rng_seed=seed,
    )


def _cmd_discover(args) -> int:
    ds = load_csv(args.data)
    cfg = _ci_config(args, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mapping = None
    if args.method == "vec":
        result = vectorized_pc(ds, cfg)
        graph = result.graph
    elif args.method in ("avg", "pca"):
        if args.method == "avg":
            mapping = TunableAggregationMap(
                "weighted_average",
                (1,) * ds.n_vars,
                weights=make_weight_stacks(ds.widths, seed=cfg.rng_seed),
            )
        else:
            mapping = fit_pca(ds, [1] * ds.n_vars)
        z = apply_map(mapping, ds)
        result = vectorized_pc(z, cfg)
        graph = result.graph
    elif args.method == "s2v":
        graph = s2v(ds, cfg)
        result = None
    elif args.method == "s2v2":
        graph = s2v2(ds, cfg)
        result = None
    else:
        print(f"unknown method {args.method!r}", file=sys.stderr)
        return 2
    (out / "graph.txt").write_text(graph.to_text())
    if result is not None:
        with open(out / "log.jsonl", "w") as fh:
            for rec in result.log:
                fh.write(json.dumps(rec.to_json_dict()) + "\n")
        (out / "result.json").write_text(result.dumps())
    if mapping is not None:
        (out / "map.json").write_text(json.dumps(mapping.to_json_dict()))
    print(f"wrote {out / 'graph.txt'}")
    return 0


_SCORE_NAMES = {"cind": "c_ind", "cdep": "c_dep_eff", "ac": "ac"}


def _cmd_adag(args) -> int:
    ds = load_csv(args.data)
    cfg = _ci_config(args, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    map_kind = {"pca": "pca", "wavg": "weighted_average"}[args.map]
    result = adag(
        ds,
        cfg,
        map_kind=map_kind,
        q=_SCORE_NAMES[args.score],
        alpha_q=args.target,
        tau_max=args.tau_max,
        m_cap=args.m_cap,
    )
    (out / "graph.txt").write_text(result.graph.to_text())
    (out / "report.json").write_text(json.dumps(result.report.to_json_dict(), indent=2))
    (out / "trace.csv").write_text(result.trace_csv())
    print(f"wrote {out / 'graph.txt'} (final m = {list(result.m)})")
    return 0


def _cmd_scores(args) -> int:
    ds = load_csv(args.data)
    cfg = _ci_config(args, seed=args.seed)
    result = DiscoveryResult.loads(Path(Path(args.agg_result) / "result.json").read_text())
    mapping = TunableAggregationMap.from_json_dict(json.loads(Path(args.map).read_text()))
    report = compute_report(ds, result, mapping, cfg, augment=args.augment)
    out = Path(args.out) / "report.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report.to_json_dict(), indent=2))
    print(f"wrote {out}")
    return 0


def _cmd_bench(args) -> int:
    cfg = ExperimentConfig.from_json_dict(json.loads(Path(args.config).read_text()))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment(cfg)
    emit_csv(records, out / "records.csv")
    emit_summary_csv(records, out / "summary.csv")
    print(f"wrote {out / 'records.csv'} and {out / 'summary.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vectorcd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset and ground truth")
    p.add_argument("--spec", required=True, help="generator spec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("discover", help="run one discovery method")
    p.add_argument("--data", required=True)
    p.add_argument("--method", required=True, choices=["vec", "avg", "pca", "s2v", "s2v2"])
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--test", default="gcm", choices=["parcorr", "maxcorr", "gcm"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap", type=int, default=499)
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("adag", help="consistency-guided adaptive aggregation")
    p.add_argument("--data", required=True)
    p.add_argument("--score", required=True, choices=["cind", "cdep", "ac"])
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--map", required=True, choices=["pca", "wavg"])
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--test", default="gcm", choices=["parcorr", "maxcorr", "gcm"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-max", type=int, default=0, dest="tau_max")
    p.add_argument("--m-cap", type=int, default=None, dest="m_cap")
    p.set_defaults(func=_cmd_adag)

    p = sub.add_parser("scores", help="consistency report for an aggregate run")
    p.add_argument("--data", required=True, help="vector-level dataset CSV")
    p.add_argument("--agg-result", required=True, dest="agg_result")
    p.add_argument("--map", required=True, help="aggregation map JSON file")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--test", default="gcm", choices=["parcorr", "maxcorr", "gcm"])
    p.add_argument("--out", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--augment", action="store_true")
    p.set_defaults(func=_cmd_scores)

    p = sub.add_parser("bench", help="repeated comparison experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
