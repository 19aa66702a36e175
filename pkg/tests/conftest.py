"""Shared test helpers: brute-force separation oracles and random graphs.

The path-enumeration separation check and the equivalence-class
enumeration here deliberately avoid the library's reachability and Meek
machinery so they can serve as independent oracles.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from vectorcd.graphs import ARROW, CIRCLE, TAIL, MixedGraph


def brute_force_msep(g: MixedGraph, xs, ys, s) -> bool:
    """Separation by exhaustive simple-path enumeration."""
    xs, ys, s = set(xs), set(ys), set(s)
    anc_s = g.ancestors(s) if s else set()

    def blocked(path) -> bool:
        for idx in range(1, len(path) - 1):
            prev, v, nxt = path[idx - 1], path[idx], path[idx + 1]
            into_prev = g.edge_marks(v, prev)[0] == ARROW
            into_nxt = g.edge_marks(v, nxt)[0] == ARROW
            if into_prev and into_nxt:
                if v not in anc_s:
                    return True
            else:
                if v in s:
                    return True
        return False

    for x in xs:
        stack = [[x]]
        while stack:
            path = stack.pop()
            v = path[-1]
            if v in ys and len(path) > 1:
                if not blocked(path):
                    return False
                continue
            for w in g.adjacent(v):
                if w in path:
                    continue
                if w in xs:
                    continue
                new = path + [w]
                if w in ys:
                    if not blocked(new):
                        return False
                else:
                    stack.append(new)
    return True


def pairwise_sep_fingerprint(g: MixedGraph):
    """All (pair, subset) separation statements, lazily."""
    n = g.n_nodes
    for i, j in itertools.combinations(range(n), 2):
        rest = [v for v in range(n) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for s in itertools.combinations(rest, r):
                yield brute_force_msep(g, {i}, {j}, set(s))


def brute_force_cpdag(dag: MixedGraph) -> MixedGraph:
    """Equivalence-class graph by enumerating same-model orientations.

    Every acyclic orientation of the input's skeleton whose full
    pairwise separation model matches the input's belongs to the class;
    an edge is directed in the result iff all class members agree.
    """
    skel = sorted(dag.skeleton_pairs())
    ref = list(pairwise_sep_fingerprint(dag))
    seen_orientations: list[tuple[int, ...]] = []
    for bits in itertools.product((0, 1), repeat=len(skel)):
        edges = [
            (i, j, TAIL, ARROW) if b == 0 else (i, j, ARROW, TAIL)
            for (i, j), b in zip(skel, bits)
        ]
        cand = MixedGraph(dag.n_nodes, edges)
        if not cand.is_directed_acyclic():
            continue
        if all(a == b for a, b in zip(pairwise_sep_fingerprint(cand), ref)):
            seen_orientations.append(bits)
    agreed = []
    arr = np.array(seen_orientations)
    for col, (i, j) in enumerate(skel):
        vals = set(arr[:, col])
        if vals == {0}:
            agreed.append((i, j, TAIL, ARROW))
        elif vals == {1}:
            agreed.append((i, j, ARROW, TAIL))
        else:
            agreed.append((i, j, CIRCLE, CIRCLE))
    return MixedGraph(dag.n_nodes, agreed)


def random_dag(rng: np.random.Generator, n: int, p: float) -> MixedGraph:
    order = rng.permutation(n)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                edges.append((int(order[a]), int(order[b]), TAIL, ARROW))
    return MixedGraph(n, edges)


def random_admg(rng: np.random.Generator, n: int, p_dir: float, p_bi: float) -> MixedGraph:
    g = random_dag(rng, n, p_dir)
    edges = list(g.edges())
    for i, j in itertools.combinations(range(n), 2):
        if not g.has_edge(i, j) and rng.random() < p_bi:
            edges.append((i, j, ARROW, ARROW))
    return MixedGraph(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
