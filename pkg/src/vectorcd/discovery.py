"""Constraint-based discovery engines.

The core is an order-independent PC variant: adjacency sets are frozen
per depth, every candidate subset at the deletion depth is tested so the
recorded separating set is the canonical (max p-value) one, and edge
deletions apply only after a depth completes.  Collider conflicts are
marked or overwritten depending on the mode.  On top of the core sit the
component-wise strategies (micro discovery plus edge aggregation, and
skeleton coarsening with block-level collider tests), the vectorized
strategy, and a time-lag expansion for series data.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .citests import CiConfig, TestRecord, ci_dispatch
from .data import Dataset
from .graphs import (
    ARROW,
    CIRCLE,
    CONFLICT,
    TAIL,
    MixedGraph,
    Partition,
    _PdagState,
    _meek_closure,
)

CiBackend = Callable[[Dataset, object, object, object, CiConfig], TestRecord]


@dataclass
class DiscoveryResult:
    graph: MixedGraph
    sepsets: dict[tuple[int, int], tuple[int, ...]]
    log: list[TestRecord] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_text(),
            "sepsets": [[i, j, list(s)] for (i, j), s in sorted(self.sepsets.items())],
            "log": [r.to_json_dict() for r in self.log],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DiscoveryResult":
        return cls(
            graph=MixedGraph.from_text(d["graph"]),
            sepsets={(i, j): tuple(s) for i, j, s in d["sepsets"]},
            log=[TestRecord.from_json_dict(r) for r in d["log"]],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, s: str) -> "DiscoveryResult":
        return cls.from_json_dict(json.loads(s))


@dataclass(frozen=True)
class EdgeCounts:
    dir_ij: int
    dir_ji: int
    undir: int
    conflict: int = 0


class _TemporalKnowledge:
    """Edge orientations forced by time order in lag-expanded datasets."""

    def __init__(self, lags):
        self.lags = tuple(lags)

    def required(self, u: int, v: int) -> tuple[int, int] | None:
        """Return (tail, head) if the pair orientation is forced, else None."""
        if self.lags[u] > self.lags[v]:
            return (u, v)
        if self.lags[u] < self.lags[v]:
            return (v, u)
        return None


def _normalize_collider_mode(mode: str) -> str:
    if mode in ("conflict", "conflict-marking", "conflict_marking"):
        return "conflict"
    if mode == "standard":
        return "standard"
    raise ValueError(f"unknown collider mode {mode!r}")


# ---------------------------------------------------------------------------
# skeleton phase
# ---------------------------------------------------------------------------


def _skeleton_phase(
    n: int,
    test: Callable[[int, int, tuple[int, ...]], TestRecord],
    max_depth: int | None = None,
):
    """Order-independent skeleton search.

    Returns (adjacency sets, sepsets, log).  For each deleted pair the
    sepset is the separating subset with the largest p-value among all
    candidates of the deletion depth (ties broken by the sorted tuple).
    """
    adj: list[set[int]] = [set(range(n)) - {i} for i in range(n)]
    sepsets: dict[tuple[int, int], tuple[int, ...]] = {}
    log: list[TestRecord] = []
    depth = 0
    while True:
        snapshot = [tuple(sorted(adj[i])) for i in range(n)]
        deletions: list[tuple[int, int, tuple[int, ...]]] = []
        pool_left = False
        for i in range(n):
            for j in snapshot[i]:
                if j < i:
                    continue
                candidates: list[tuple[float, tuple[int, ...]]] = []
                tested: set[tuple[int, ...]] = set()
                for side, other in ((i, j), (j, i)):
                    pool = [k for k in snapshot[side] if k != other]
                    if len(pool) > depth:
                        pool_left = True
                    if len(pool) < depth:
                        continue
                    for S in itertools.combinations(pool, depth):
                        if S in tested:
                            continue
                        tested.add(S)
                        rec = test(i, j, S)
                        log.append(rec)
                        if rec.decided_independent:
                            candidates.append((rec.p_value, S))
                if candidates:
                    best_p = max(p for p, _ in candidates)
                    best = min(S for p, S in candidates if p == best_p)
                    deletions.append((i, j, best))
        for i, j, S in deletions:
            adj[i].discard(j)
            adj[j].discard(i)
            sepsets[(i, j)] = S
        depth += 1
        if max_depth is not None and depth > max_depth:
            break
        if not pool_left:
            break
    return adj, sepsets, log


def _orient_colliders(
    st: _PdagState,
    sepsets: dict[tuple[int, int], tuple[int, ...]],
    mode: str,
    knowledge: _TemporalKnowledge | None,
) -> None:
    n = st.n
    for j in range(n):
        neighbors = sorted(st.adj[j])
        for i, k in itertools.combinations(neighbors, 2):
            if k in st.adj[i]:
                continue
            key = (i, k) if i < k else (k, i)
            if key not in sepsets:
                continue
            if j in sepsets[key]:
                continue
            for tail, head in ((i, j), (k, j)):
                if knowledge is not None and knowledge.required(tail, head) == (head, tail):
                    # time order is a hard constraint, not evidence to weigh
                    continue
                current = st.get(tail, head)
                if current == (CIRCLE, CIRCLE):
                    st.orient(tail, head)
                elif current == (TAIL, ARROW):
                    pass
                elif current == (CONFLICT, CONFLICT):
                    pass
                else:
                    if mode == "conflict":
                        st.conflict(tail, head)
                    else:
                        st.orient(tail, head)


def _apply_knowledge(st: _PdagState, knowledge: _TemporalKnowledge | None) -> None:
    if knowledge is None:
        return
    for (i, j) in list(st.marks):
        req = knowledge.required(i, j)
        if req is not None and st.get(*req) == (CIRCLE, CIRCLE):
            st.orient(*req)


def pc_stable(
    dataset: Dataset,
    cfg: CiConfig,
    collider_mode: str = "conflict",
    ci: CiBackend | None = None,
    max_depth: int | None = None,
) -> DiscoveryResult:
    """PC with depth-frozen adjacency snapshots and canonical sepsets.

    Each macro variable of the dataset is one node.  Lag-annotated
    datasets contribute temporal background knowledge: cross-lag edges
    are oriented from the deeper lag toward the present and collider
    orientations against time are rejected (marked in conflict mode).
    """
    mode = _normalize_collider_mode(collider_mode)
    n = dataset.n_vars
    if n < 2:
        raise ValueError("need at least 2 macro variables")
    backend = ci if ci is not None else ci_dispatch
    if ci is None:
        if dataset.n_samples < 10:
            raise ValueError("need at least 10 samples")
        if cfg.test_kind == "parcorr" and any(w > 1 for w in dataset.widths):
            raise ValueError("parcorr cannot test multivariate blocks; configure maxcorr or gcm")

    def run_test(i: int, j: int, S: tuple[int, ...]) -> TestRecord:
        try:
            return backend(dataset, i, j, frozenset(S), cfg)
        except Exception as exc:
            raise RuntimeError(f"CI test failed for pair ({i},{j}) given {sorted(S)}") from exc

    adj, sepsets, log = _skeleton_phase(n, run_test, max_depth=max_depth)
    edges = []
    for i in range(n):
        for j in adj[i]:
            if i < j:
                edges.append((i, j, CIRCLE, CIRCLE))
    st = _PdagState(MixedGraph(n, edges))
    knowledge = _TemporalKnowledge(dataset.lags) if dataset.lags is not None else None
    _apply_knowledge(st, knowledge)
    _orient_colliders(st, sepsets, mode, knowledge)
    _meek_closure(st)
    return DiscoveryResult(st.to_graph(), sepsets, log)


def vectorized_pc(
    dataset: Dataset,
    cfg: CiConfig,
    collider_mode: str = "conflict",
    ci: CiBackend | None = None,
) -> DiscoveryResult:
    """PC treating each vector block as a single node."""
    return pc_stable(dataset, cfg, collider_mode=collider_mode, ci=ci)


# ---------------------------------------------------------------------------
# component-wise strategies
# ---------------------------------------------------------------------------


def edge_counts(micro_graph: MixedGraph, p: Partition) -> dict[tuple[int, int], EdgeCounts]:
    """Crossing-edge orientation counts per macro pair."""
    lab = p.micro_to_macro
    raw: dict[tuple[int, int], list[int]] = {}
    for a, b, ma, mb in micro_graph.edges():
        bi, bj = lab[a], lab[b]
        if bi == bj:
            continue
        key = (bi, bj) if bi < bj else (bj, bi)
        marks = (ma, mb) if bi < bj else (mb, ma)
        cell = raw.setdefault(key, [0, 0, 0, 0])
        if marks == (TAIL, ARROW):
            cell[0] += 1
        elif marks == (ARROW, TAIL):
            cell[1] += 1
        elif marks == (CONFLICT, CONFLICT):
            cell[3] += 1
        else:
            cell[2] += 1
    return {k: EdgeCounts(*v) for k, v in raw.items()}


def aggregate_edges(micro_cpdag: MixedGraph, p: Partition, mode: str = "majority") -> MixedGraph:
    """Collapse micro edge orientation counts into one macro edge mark.

    Majority: undirected wins when it strictly beats both directions; a
    direction wins when it strictly beats the reverse and at least ties
    the undirected count; equal nonzero directions give a conflict.
    Conservative: any two-sided directional evidence gives a conflict,
    otherwise direction wins iff it at least ties the undirected count.
    """
    if mode not in ("majority", "conservative"):
        raise ValueError(f"unknown edge aggregation mode {mode!r}")
    counts = edge_counts(micro_cpdag, p)
    edges = []
    for (i, j), c in sorted(counts.items()):
        dir_ij, dir_ji, undir = c.dir_ij, c.dir_ji, c.undir
        if dir_ij == dir_ji == undir == 0:
            # only conflict-marked crossings: keep the adjacency as a conflict
            edges.append((i, j, CONFLICT, CONFLICT))
            continue
        if mode == "majority":
            if undir > dir_ij and undir > dir_ji:
                edges.append((i, j, CIRCLE, CIRCLE))
            elif dir_ij > dir_ji and dir_ij >= undir:
                edges.append((i, j, TAIL, ARROW))
            elif dir_ji > dir_ij and dir_ji >= undir:
                edges.append((i, j, ARROW, TAIL))
            else:
                edges.append((i, j, CONFLICT, CONFLICT))
        else:
            if (dir_ij > 0 and dir_ji > 0) or c.conflict > 0:
                edges.append((i, j, CONFLICT, CONFLICT))
            elif dir_ij > 0:
                edges.append((i, j, TAIL, ARROW) if dir_ij >= undir else (i, j, CIRCLE, CIRCLE))
            elif dir_ji > 0:
                edges.append((i, j, ARROW, TAIL) if dir_ji >= undir else (i, j, CIRCLE, CIRCLE))
            else:
                edges.append((i, j, CIRCLE, CIRCLE))
    return MixedGraph(p.n_macro, edges)


def s2v(
    dataset: Dataset,
    cfg: CiConfig,
    edge_agg: str = "majority",
    collider_mode: str = "conflict",
    ci: CiBackend | None = None,
) -> MixedGraph:
    """Component-wise discovery: PC over all micro columns, then edge
    aggregation under the canonical partition."""
    if dataset.n_vars == 1:
        return MixedGraph(1)
    micro = dataset.as_micro()
    result = pc_stable(micro, cfg, collider_mode=collider_mode, ci=ci)
    return aggregate_edges(result.graph, dataset.partition, edge_agg)


def s2v2(
    dataset: Dataset,
    cfg: CiConfig,
    collider_mode: str = "conflict",
    ci: CiBackend | None = None,
) -> MixedGraph:
    """Component-wise discovery with block-level orientation.

    Micro skeleton only, coarsened to a macro skeleton; an unshielded
    macro triple (i, j, k) becomes a collider at j iff every separated
    component pair across blocks i and k stays independent after the
    middle block's columns are removed from its recorded separating set.
    Meek rules close the macro graph.
    """
    mode = _normalize_collider_mode(collider_mode)
    part = dataset.partition
    n_macro = part.n_macro
    if n_macro == 1:
        return MixedGraph(1)
    micro = dataset.as_micro()
    n = micro.n_vars
    backend = ci if ci is not None else ci_dispatch
    if ci is None and dataset.n_samples < 10:
        raise ValueError("need at least 10 samples")

    def run_test(i: int, j: int, S) -> TestRecord:
        try:
            return backend(micro, i, j, frozenset(S), cfg)
        except Exception as exc:
            raise RuntimeError(f"CI test failed for pair ({i},{j}) given {sorted(S)}") from exc

    adj, sepsets, _log = _skeleton_phase(n, run_test)
    micro_skel = MixedGraph(
        n, [(i, j, CIRCLE, CIRCLE) for i in range(n) for j in adj[i] if i < j]
    )
    st = _PdagState(_coarsen_skeleton(micro_skel, part))

    block_cols = {b: set(int(c) for c in part.block_cols(b)) for b in range(n_macro)}
    for j in range(n_macro):
        neighbors = sorted(st.adj[j])
        for i, k in itertools.combinations(neighbors, 2):
            if k in st.adj[i]:
                continue
            is_collider = True
            for a in sorted(block_cols[i]):
                for b in sorted(block_cols[k]):
                    key = (a, b) if a < b else (b, a)
                    S_ab = sepsets.get(key)
                    if S_ab is None:
                        # pair survived in the micro skeleton: blocks are
                        # not fully separable, treat as non-collider evidence
                        is_collider = False
                        break
                    stripped = tuple(c for c in S_ab if c not in block_cols[j])
                    if stripped == S_ab:
                        continue
                    rec = run_test(a, b, stripped)
                    if not rec.decided_independent:
                        is_collider = False
                        break
                if not is_collider:
                    break
            if not is_collider:
                continue
            for tail, head in ((i, j), (k, j)):
                current = st.get(tail, head)
                if current == (CIRCLE, CIRCLE):
                    st.orient(tail, head)
                elif current in ((TAIL, ARROW), (CONFLICT, CONFLICT)):
                    pass
                else:
                    if mode == "conflict":
                        st.conflict(tail, head)
                    else:
                        st.orient(tail, head)
    _meek_closure(st)
    return st.to_graph()


def _coarsen_skeleton(micro_skel: MixedGraph, p: Partition) -> MixedGraph:
    lab = p.micro_to_macro
    pairs = set()
    for a, b, _, _ in micro_skel.edges():
        bi, bj = lab[a], lab[b]
        if bi != bj:
            pairs.add((min(bi, bj), max(bi, bj)))
    return MixedGraph(p.n_macro, [(i, j, CIRCLE, CIRCLE) for i, j in sorted(pairs)])


# ---------------------------------------------------------------------------
# time series support
# ---------------------------------------------------------------------------


def lag_expand(dataset: Dataset, tau_max: int) -> Dataset:
    """Window-expand a time-indexed dataset into (variable, lag) blocks.

    Row t of the result aligns block (i, tau) with the original block i
    at time t - tau; lag-0 blocks come first.  Downstream discovery picks
    up the lag annotations as temporal background knowledge.
    """
    if tau_max < 0:
        raise ValueError("tau_max must be nonnegative")
    if tau_max == 0:
        return dataset
    n = dataset.n_samples
    if n <= tau_max:
        raise ValueError("need more rows than tau_max")
    blocks = []
    names = []
    sizes = []
    lags = []
    for tau in range(tau_max + 1):
        rows = slice(tau_max - tau, n - tau)
        for i in range(dataset.n_vars):
            blocks.append(dataset.block(i)[rows])
            names.append(dataset.names[i])
            sizes.append(dataset.widths[i])
            lags.append(tau)
    X = np.column_stack(blocks)
    return Dataset(X, Partition.from_sizes(sizes), tuple(names), tuple(lags))


# ---------------------------------------------------------------------------
# log replay
# ---------------------------------------------------------------------------


def replay_skeleton(n_vars: int, log: Iterable[TestRecord]) -> MixedGraph:
    """Re-run the skeleton phase answering every query from the log.

    Raises KeyError if the log is missing a decision the phase needs,
    so a completed run's log always reconstructs its own skeleton.
    """
    answers: dict[tuple, TestRecord] = {}
    for rec in log:
        answers[(rec.pair, rec.cond)] = rec

    def lookup(i: int, j: int, S) -> TestRecord:
        key_pair = ((i,), (j,)) if i < j else ((j,), (i,))
        return answers[(key_pair, tuple(sorted(S)))]

    adj, _seps, _ = _skeleton_phase(n_vars, lookup)
    return MixedGraph(
        n_vars, [(i, j, CIRCLE, CIRCLE) for i in range(n_vars) for j in adj[i] if i < j]
    )
