"""Aggregation maps, aggregation-consistency scores, and the adaptive
dimension-raising wrapper.

The scores compare what discovery concluded on aggregated variables
against direct tests on the underlying vector variables: every
independence used by the aggregate run must replicate at the vector
level (independence score), and the dependence evidence behind each
aggregate adjacency must replicate as well (dependence scores).  The
wrapper raises per-variable aggregate dimension until a chosen score
reaches its target.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .citests import CiConfig, TestRecord, _as_key, ci_dispatch
from .data import Dataset
from .discovery import DiscoveryResult, lag_expand, vectorized_pc
from .graphs import ARROW, CIRCLE, CONFLICT, TAIL, MixedGraph, Partition
from .oracle import GaussianCovCi


# ---------------------------------------------------------------------------
# tunable maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TunableAggregationMap:
    """Per-variable dimension reduction with a tuning vector m.

    weighted_average: Z_i = W_i[:m_i] @ X_i with a fixed full-rank weight
    stack per variable (row 0 is the plain average).
    pca: Z_i = (X_i - mean_i) @ B_i[:, :m_i] with eigenvector loadings in
    descending eigenvalue order.
    """

    kind: str
    m: tuple[int, ...]
    weights: tuple[np.ndarray, ...] | None = None
    fitted_basis: tuple[np.ndarray, ...] | None = None
    means: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("weighted_average", "pca"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if any(mi < 1 for mi in self.m):
            raise ValueError("tuning entries must be >= 1")
        if self.kind == "weighted_average":
            if self.weights is None or len(self.weights) != len(self.m):
                raise ValueError("weighted_average needs one weight stack per variable")
            for mi, w in zip(self.m, self.weights):
                if w.ndim != 2 or mi > w.shape[0] or w.shape[0] > w.shape[1]:
                    raise ValueError("weight stack shape must be (rows<=d_i, d_i)")
                if np.linalg.matrix_rank(w) < w.shape[0]:
                    raise ValueError("weight stack must have full row rank")
        if self.kind == "pca" and self.fitted_basis is not None:
            for mi, b in zip(self.m, self.fitted_basis):
                if mi > b.shape[1]:
                    raise ValueError("tuning entry exceeds block dimension")
                if not np.allclose(b.T @ b, np.eye(b.shape[1]), atol=1e-8):
                    raise ValueError("pca basis columns must be orthonormal")

    @property
    def widths_in(self) -> tuple[int, ...]:
        if self.kind == "weighted_average":
            return tuple(w.shape[1] for w in self.weights)
        if self.fitted_basis is None:
            raise RuntimeError("pca map has no fitted basis")
        return tuple(b.shape[0] for b in self.fitted_basis)

    def block_matrix(self, i: int) -> np.ndarray:
        """The (m_i, d_i) linear map applied to block i (ignoring centering)."""
        if self.kind == "weighted_average":
            return self.weights[i][: self.m[i]]
        if self.fitted_basis is None:
            raise RuntimeError("pca map has no fitted basis")
        return self.fitted_basis[i][:, : self.m[i]].T

    def linear_matrix(self) -> np.ndarray:
        """Block-diagonal matrix mapping stacked micro columns to aggregates."""
        blocks = [self.block_matrix(i) for i in range(len(self.m))]
        d_tot = sum(b.shape[1] for b in blocks)
        m_tot = sum(b.shape[0] for b in blocks)
        out = np.zeros((m_tot, d_tot))
        r = c = 0
        for b in blocks:
            out[r : r + b.shape[0], c : c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "m": list(self.m),
            "weights": None
            if self.weights is None
            else [w.tolist() for w in self.weights],
            "fitted_basis": None
            if self.fitted_basis is None
            else [b.tolist() for b in self.fitted_basis],
            "means": None if self.means is None else [m.tolist() for m in self.means],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TunableAggregationMap":
        conv = lambda xs: None if xs is None else tuple(np.asarray(x, dtype=float) for x in xs)
        return cls(
            kind=d["kind"],
            m=tuple(d["m"]),
            weights=conv(d.get("weights")),
            fitted_basis=conv(d.get("fitted_basis")),
            means=conv(d.get("means")),
        )


def make_weight_stacks(
    widths: Sequence[int], seed: int = 0
) -> tuple[np.ndarray, ...]:
    """Full-rank per-variable weight stacks with a uniform first row.

    Row 0 realizes the plain average; further rows are drawn uniformly in
    (0, 1) and redrawn until the stack is invertible, so raising the
    tuning parameter strictly adds information.
    """
    rng = np.random.default_rng(np.random.SeedSequence((0x57A6, seed & 0xFFFFFFFF)))
    stacks = []
    for d in widths:
        stack = np.empty((d, d))
        stack[0] = 1.0 / d
        while True:
            if d > 1:
                stack[1:] = rng.uniform(0.05, 0.95, size=(d - 1, d))
            if np.linalg.matrix_rank(stack) == d:
                break
        stacks.append(stack)
    return tuple(stacks)


def fit_pca(dataset: Dataset, m: Sequence[int]) -> TunableAggregationMap:
    """Per-block centered-covariance eigenvectors, descending eigenvalues.

    The sign convention makes each loading's largest-magnitude entry
    positive; eigenvalue ties keep index order.
    """
    widths = dataset.widths
    if len(m) != len(widths):
        raise ValueError("one tuning entry per variable required")
    if dataset.n_samples <= max(widths):
        raise ValueError("need more samples than the widest block")
    bases = []
    means = []
    for i in range(dataset.n_vars):
        block = dataset.block(i)
        mu = block.mean(axis=0)
        centered = block - mu
        cov = centered.T @ centered / max(dataset.n_samples - 1, 1)
        vals, vecs = np.linalg.eigh(cov)
        order = np.argsort(-vals, kind="stable")
        vecs = vecs[:, order]
        for c in range(vecs.shape[1]):
            lead = np.argmax(np.abs(vecs[:, c]))
            if vecs[lead, c] < 0:
                vecs[:, c] = -vecs[:, c]
        bases.append(vecs)
        means.append(mu)
    return TunableAggregationMap(
        kind="pca",
        m=tuple(int(v) for v in m),
        fitted_basis=tuple(bases),
        means=tuple(means),
    )


def apply_map(mapping: TunableAggregationMap, dataset: Dataset) -> Dataset:
    """Per-block transform; output block widths follow the tuning vector."""
    widths = dataset.widths
    if mapping.widths_in != widths:
        raise ValueError("map dimensions do not match dataset partition")
    if any(mi > d for mi, d in zip(mapping.m, widths)):
        raise ValueError("tuning entry exceeds block dimension")
    cols = []
    for i in range(dataset.n_vars):
        block = dataset.block(i)
        if mapping.kind == "pca":
            if mapping.fitted_basis is None:
                raise RuntimeError("pca map must be fitted before application")
            block = block - mapping.means[i]
        cols.append(block @ mapping.block_matrix(i).T)
    X = np.column_stack(cols)
    return Dataset(
        X, Partition.from_sizes(list(mapping.m)), dataset.names, dataset.lags
    )


# ---------------------------------------------------------------------------
# consistency scores
# ---------------------------------------------------------------------------


CiBackend = Callable[[Dataset, object, object, object, CiConfig], TestRecord]


@dataclass(frozen=True)
class Statement:
    """One (in)dependence claim carried from the aggregate to vector level."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    cond: tuple[int, ...]
    p_agg: float
    p_vec: float
    consistent: bool
    source: str = "log"

    def to_json_dict(self) -> dict:
        return {
            "left": list(self.left),
            "right": list(self.right),
            "cond": list(self.cond),
            "p_agg": self.p_agg,
            "p_vec": self.p_vec,
            "consistent": self.consistent,
            "source": self.source,
        }


@dataclass
class ScorePart:
    score: float
    consistent: list[Statement] = field(default_factory=list)
    inconsistent: list[Statement] = field(default_factory=list)

    @property
    def n_statements(self) -> int:
        return len(self.consistent) + len(self.inconsistent)


@dataclass
class ConsistencyReport:
    c_ind: float
    c_dep_effective: float
    c_dep: float
    c_dep_kind: str  # effective | complete
    ac: float
    consistent_sets: list[Statement] = field(default_factory=list)
    inconsistent_sets: list[Statement] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "c_ind": self.c_ind,
            "c_dep_effective": self.c_dep_effective,
            "c_dep": self.c_dep,
            "c_dep_kind": self.c_dep_kind,
            "ac": self.ac,
            "consistent_sets": [s.to_json_dict() for s in self.consistent_sets],
            "inconsistent_sets": [s.to_json_dict() for s in self.inconsistent_sets],
        }


def ac_score(c_ind: float, c_dep: float) -> float:
    """Arithmetic mean of the independence and dependence scores."""
    for v in (c_ind, c_dep):
        if not 0.0 <= v <= 1.0:
            raise ValueError("scores must lie in [0, 1]")
    return (c_ind + c_dep) / 2.0


def extend_to_dag(g: MixedGraph) -> MixedGraph:
    """A deterministic DAG consistent with a partially directed graph.

    Uses the sink-elimination extension; when no consistent extension
    exists (noisy outputs with conflicts), falls back to orienting the
    undecided edges in index order without creating directed cycles.
    """
    n = g.n_nodes
    directed: set[tuple[int, int]] = set(g.directed_edges())
    undecided: set[tuple[int, int]] = set()
    for i, j, mi, mj in g.edges():
        if (mi, mj) in ((CIRCLE, CIRCLE), (TAIL, TAIL), (CONFLICT, CONFLICT)):
            undecided.add((i, j))

    remaining = set(range(n))
    dir_work = set(directed)
    und_work = set(undecided)
    oriented: dict[tuple[int, int], tuple[int, int]] = {}
    progress = True
    while remaining and progress:
        progress = False
        for v in sorted(remaining):
            out_deg = any(a == v for a, b in dir_work)
            if out_deg:
                continue
            nbrs = {b for a, b in dir_work if a == v} | {a for a, b in dir_work if b == v}
            und_nbrs = {b if a == v else a for a, b in und_work if v in (a, b)}
            nbrs |= und_nbrs
            ok = True
            for u in und_nbrs:
                others = nbrs - {u}
                for w in others:
                    if w != u and not g.has_edge(u, w):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            for u in sorted(und_nbrs):
                key = (u, v) if (u, v) in und_work else (v, u)
                oriented[key] = (u, v)
                und_work.discard(key)
            dir_work = {(a, b) for a, b in dir_work if v not in (a, b)}
            remaining.discard(v)
            progress = True
            break
    if remaining and (und_work or dir_work):
        # no consistent extension: deterministic acyclic fallback that
        # keeps every orientation not closing a directed cycle
        children: dict[int, set[int]] = {v: set() for v in range(n)}

        def reaches(a: int, b: int) -> bool:
            stack, seen = [a], set()
            while stack:
                x = stack.pop()
                if x == b:
                    return True
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(children[x])
            return False

        final: list[tuple[int, int]] = []
        for a, b in sorted(directed):
            if reaches(b, a):
                a, b = b, a
            children[a].add(b)
            final.append((a, b))
        for i, j in sorted(undecided):
            a, b = (j, i) if reaches(j, i) else (i, j)
            children[a].add(b)
            final.append((a, b))
        return MixedGraph(n, [(a, b, TAIL, ARROW) for a, b in final])
    edges = [(a, b, TAIL, ARROW) for a, b in directed]
    edges += [(a, b, TAIL, ARROW) for a, b in oriented.values()]
    return MixedGraph(n, edges)


def _local_markov_statements(dag: MixedGraph):
    """(node, nondescendants-minus-parents, parents) per node."""
    n = dag.n_nodes
    desc: list[set[int]] = []
    for v in range(n):
        seen = set()
        stack = [v]
        while stack:
            x = stack.pop()
            for c in dag.children(x):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        desc.append(seen)
    out = []
    for v in range(n):
        pa = set(dag.parents(v))
        nd = set(range(n)) - desc[v] - pa - {v}
        if nd:
            out.append((v, tuple(sorted(nd)), tuple(sorted(pa))))
    return out


def _log_independences(log: Sequence[TestRecord]):
    seen = set()
    out = []
    for rec in log:
        if not rec.decided_independent:
            continue
        key = (rec.pair, rec.cond)
        if key in seen:
            continue
        seen.add(key)
        out.append(rec)
    return out


def c_ind_score(
    vec_data: Dataset,
    agg_result: DiscoveryResult,
    mapping: TunableAggregationMap,
    cfg: CiConfig,
    augment: bool = False,
    ci_vec: CiBackend | None = None,
    ci_agg: CiBackend | None = None,
    z_data: Dataset | None = None,
) -> ScorePart:
    """Fraction of aggregate-level independences that replicate on vectors.

    Each independence (i, j | S) accepted during the aggregate run is
    re-tested between the corresponding vector blocks given the union of
    the blocks in S.  With `augment`, the local-Markov statements of one
    deterministic DAG extension of the output graph are first verified on
    the aggregates and, when accepted there, carried to the vector level
    as well.  No statements at all scores 1 by convention.  `z_data`
    overrides the aggregate view when it is not plain apply_map output
    (e.g. lag-expanded aggregates).
    """
    vec_backend = ci_vec if ci_vec is not None else ci_dispatch
    statements: list[tuple[tuple, tuple, tuple, float, str]] = []
    for rec in _log_independences(agg_result.log):
        statements.append((rec.pair[0], rec.pair[1], rec.cond, rec.p_value, "log"))
    if augment:
        agg_backend = ci_agg if ci_agg is not None else ci_dispatch
        if z_data is None:
            z_data = apply_map(mapping, vec_data)
        logged = {(r.pair, r.cond) for r in _log_independences(agg_result.log)}
        dag = extend_to_dag(agg_result.graph)
        for v, nd, pa in _local_markov_statements(dag):
            pair = ((v,), nd) if (v,) < nd else (nd, (v,))
            if (pair, pa) in logged:
                continue
            rec = agg_backend(z_data, (v,), nd, frozenset(pa), cfg)
            if rec.decided_independent:
                statements.append(((v,), nd, pa, rec.p_value, "augmented"))
    part = ScorePart(score=1.0)
    for left, right, cond, p_agg, source in statements:
        rec = vec_backend(vec_data, left, right, frozenset(cond), cfg)
        st = Statement(
            left=tuple(left),
            right=tuple(right),
            cond=tuple(cond),
            p_agg=p_agg,
            p_vec=rec.p_value,
            consistent=rec.decided_independent,
            source=source,
        )
        (part.consistent if st.consistent else part.inconsistent).append(st)
    total = part.n_statements
    part.score = 1.0 if total == 0 else len(part.consistent) / total
    return part


def _dependence_records(log: Sequence[TestRecord], i: int, j: int):
    """Dependent singleton-pair records for macro pair (i, j)."""
    key = ((i,), (j,)) if i < j else ((j,), (i,))
    out = []
    seen = set()
    for rec in log:
        if rec.pair != key or rec.decided_independent:
            continue
        if rec.cond in seen:
            continue
        seen.add(rec.cond)
        out.append(rec)
    return out


def _select_deepest_min_p(pool: list[tuple[tuple[int, ...], float]]):
    """The statement carrying the most refined dependence evidence: the
    largest conditioning set, smallest p-value among those, then the
    lexicographically first set."""
    depth = max(len(c) for c, _ in pool)
    deepest = [(c, p) for c, p in pool if len(c) == depth]
    best_p = min(p for _, p in deepest)
    return min((c, p) for c, p in deepest if p == best_p)


def meta_c_dep_score(
    vec_data: Dataset,
    agg_result: DiscoveryResult,
    mapping: TunableAggregationMap,
    cfg: CiConfig,
    dep_strategy: str = "adjacency",
    cond_strategy: str = "tested",
    sort_strategy: str = "min_p",
    ci_vec: CiBackend | None = None,
    ci_agg: CiBackend | None = None,
    z_data: Dataset | None = None,
) -> ScorePart:
    """Dependence-consistency score with pluggable statement selection.

    dep_strategy: which pairs to verify - aggregate adjacencies only, or
    every pair with dependence evidence (connection).
    cond_strategy: where candidate conditioning sets come from - the run's
    recorded tests, or all subsets (guarded to at most 8 variables).
    sort_strategy: verify only the most refined minimum-p statement per
    pair (min_p) or every candidate statement (none).

    (adjacency, tested, min_p) is the effective score; (connection, all,
    none) is the complete strategy.
    """
    if dep_strategy not in ("adjacency", "connection"):
        raise ValueError(f"unknown dependence strategy {dep_strategy!r}")
    if cond_strategy not in ("tested", "all"):
        raise ValueError(f"unknown conditioning strategy {cond_strategy!r}")
    if sort_strategy not in ("min_p", "none"):
        raise ValueError(f"unknown sorting strategy {sort_strategy!r}")
    graph = agg_result.graph
    n = graph.n_nodes
    if cond_strategy == "all" and n > 8:
        raise ValueError("'all' conditioning strategy is limited to 8 aggregate variables")
    vec_backend = ci_vec if ci_vec is not None else ci_dispatch
    agg_backend = ci_agg if ci_agg is not None else ci_dispatch
    if cond_strategy == "all" and z_data is None:
        z_data = apply_map(mapping, vec_data)

    if dep_strategy == "adjacency":
        pairs = [(i, j) for i, j, _, _ in graph.edges()]
    else:
        pairs = list(itertools.combinations(range(n), 2))

    part = ScorePart(score=1.0)
    for i, j in pairs:
        pool: list[tuple[tuple[int, ...], float]] = []
        if cond_strategy == "tested":
            for rec in _dependence_records(agg_result.log, i, j):
                pool.append((rec.cond, rec.p_value))
        else:
            rest = [v for v in range(n) if v not in (i, j)]
            for r in range(len(rest) + 1):
                for S in itertools.combinations(rest, r):
                    rec = agg_backend(z_data, i, j, frozenset(S), cfg)
                    if not rec.decided_independent:
                        pool.append((S, rec.p_value))
        fallback = False
        if not pool:
            if dep_strategy == "connection":
                continue
            # adjacent pair without recorded dependence evidence: verify
            # the unconditional statement directly
            pool = [((), float("nan"))]
            fallback = True
        if sort_strategy == "min_p" and not fallback:
            pool = [_select_deepest_min_p(pool)]
        for cond, p_agg in pool:
            rec = vec_backend(vec_data, i, j, frozenset(cond), cfg)
            st = Statement(
                left=(min(i, j),),
                right=(max(i, j),),
                cond=tuple(cond),
                p_agg=p_agg,
                p_vec=rec.p_value,
                consistent=not rec.decided_independent,
                source="fallback" if fallback else "log" if cond_strategy == "tested" else "enumerated",
            )
            (part.consistent if st.consistent else part.inconsistent).append(st)
    total = part.n_statements
    part.score = 1.0 if total == 0 else len(part.consistent) / total
    return part


def effective_c_dep_score(
    vec_data: Dataset,
    agg_result: DiscoveryResult,
    mapping: TunableAggregationMap,
    cfg: CiConfig,
    ci_vec: CiBackend | None = None,
) -> ScorePart:
    """Adjacency-confirmation score over the aggregate skeleton.

    For each adjacent aggregate pair, the most refined recorded
    dependence statement (largest conditioning set, then smallest
    p-value) is re-tested on the vector blocks; the score is the fraction
    of adjacencies whose statement replicates.  No adjacencies scores 1.
    """
    return meta_c_dep_score(
        vec_data,
        agg_result,
        mapping,
        cfg,
        dep_strategy="adjacency",
        cond_strategy="tested",
        sort_strategy="min_p",
        ci_vec=ci_vec,
    )


# ---------------------------------------------------------------------------
# adaptive wrapper
# ---------------------------------------------------------------------------


@dataclass
class AdagResult:
    graph: MixedGraph
    report: ConsistencyReport
    m: tuple[int, ...]
    trace: list[dict]
    result: DiscoveryResult
    mapping: TunableAggregationMap

    def trace_csv(self) -> str:
        lines = ["iteration,m,score,edges"]
        for row in self.trace:
            m_str = "|".join(str(v) for v in row["m"])
            lines.append(f"{row['iteration']},{m_str},{row['score']:.6f},{row['edges']}")
        return "\n".join(lines) + "\n"


def _build_report(c_ind_part, c_dep_eff_part, c_dep_part, c_dep_kind) -> ConsistencyReport:
    ac = ac_score(c_ind_part.score, c_dep_part.score)
    return ConsistencyReport(
        c_ind=c_ind_part.score,
        c_dep_effective=c_dep_eff_part.score,
        c_dep=c_dep_part.score,
        c_dep_kind=c_dep_kind,
        ac=ac,
        consistent_sets=c_ind_part.consistent
        + c_dep_eff_part.consistent
        + (c_dep_part.consistent if c_dep_part is not c_dep_eff_part else []),
        inconsistent_sets=c_ind_part.inconsistent
        + c_dep_eff_part.inconsistent
        + (c_dep_part.inconsistent if c_dep_part is not c_dep_eff_part else []),
    )


def compute_report(
    vec_data: Dataset,
    agg_result: DiscoveryResult,
    mapping: TunableAggregationMap,
    cfg: CiConfig,
    augment: bool = False,
    complete_dep: bool = False,
    ci_vec: CiBackend | None = None,
    ci_agg: CiBackend | None = None,
    z_data: Dataset | None = None,
) -> ConsistencyReport:
    """Full consistency report for an aggregate discovery result."""
    ind = c_ind_score(
        vec_data, agg_result, mapping, cfg, augment, ci_vec, ci_agg, z_data=z_data
    )
    eff = meta_c_dep_score(
        vec_data, agg_result, mapping, cfg, "adjacency", "tested", "min_p",
        ci_vec, ci_agg, z_data=z_data,
    )
    if complete_dep and agg_result.graph.n_nodes <= 8:
        comp = meta_c_dep_score(
            vec_data, agg_result, mapping, cfg, "connection", "all", "none",
            ci_vec, ci_agg, z_data=z_data,
        )
        return _build_report(ind, eff, comp, "complete")
    return _build_report(ind, eff, eff, "effective")


def adag(
    vec_data: Dataset,
    cfg: CiConfig,
    map_kind: str = "pca",
    q: str = "ac",
    alpha_q: float = 0.8,
    algo: str = "vec",
    collider_mode: str = "conflict",
    tau_max: int = 0,
    augment: bool = False,
    m_cap: int | None = None,
    population_cov: np.ndarray | None = None,
) -> AdagResult:
    """Raise aggregate dimension until the chosen score meets its target.

    Starts from one dimension per variable, increments every component of
    the tuning vector (capped at the block widths and `m_cap`), refits
    the map each round, runs discovery over the aggregates, and stops as
    soon as the q-score reaches `alpha_q` or the tuning vector is
    maximal.  With `population_cov`, all CI decisions on both levels are
    taken from the exact joint covariance instead of the data.
    """
    if q not in ("c_ind", "c_dep_eff", "ac"):
        raise ValueError(f"unknown q-score {q!r}")
    if algo != "vec":
        raise ValueError("only the vectorized engine runs over aggregates")
    if not 0.0 <= alpha_q <= 1.0:
        raise ValueError("alpha_q must lie in [0, 1]")
    if population_cov is not None and tau_max:
        raise ValueError("covariance oracle runs are defined for the static case")
    widths = vec_data.widths
    limit = [min(d, m_cap) if m_cap else d for d in widths]
    m = [min(1, l) for l in limit]
    stacks = (
        make_weight_stacks(widths, seed=cfg.rng_seed)
        if map_kind == "weighted_average"
        else None
    )
    ci_vec = ci_agg = None
    vec_view = lag_expand(vec_data, tau_max) if tau_max else vec_data
    if population_cov is not None:
        ci_vec = GaussianCovCi(population_cov)

    trace: list[dict] = []
    iteration = 0
    while True:
        iteration += 1
        if map_kind == "pca":
            mapping = fit_pca(vec_data, m)
        elif map_kind == "weighted_average":
            mapping = TunableAggregationMap("weighted_average", tuple(m), weights=stacks)
        else:
            raise ValueError(f"unknown map kind {map_kind!r}")
        z_data = apply_map(mapping, vec_data)
        z_view = lag_expand(z_data, tau_max) if tau_max else z_data
        if population_cov is not None:
            C = mapping.linear_matrix()
            ci_agg = GaussianCovCi(C @ population_cov @ C.T)
        result = vectorized_pc(z_view, cfg, collider_mode=collider_mode, ci=ci_agg)
        report = compute_report(
            vec_view,
            result,
            mapping,
            cfg,
            augment=augment,
            complete_dep=(q == "ac"),
            ci_vec=ci_vec,
            ci_agg=ci_agg,
            z_data=z_view,
        )
        q_val = {"c_ind": report.c_ind, "c_dep_eff": report.c_dep_effective, "ac": report.ac}[q]
        trace.append(
            {
                "iteration": iteration,
                "m": tuple(m),
                "score": q_val,
                "edges": result.graph.n_edges,
            }
        )
        if q_val >= alpha_q or all(mi >= li for mi, li in zip(m, limit)):
            return AdagResult(result.graph, report, tuple(m), trace, result, mapping)
        m = [min(mi + 1, li) for mi, li in zip(m, limit)]
