"""Mixed graphs with per-endpoint edge marks, and the separation /
orientation / coarsening algorithms built on them.

A mixed graph stores at most one edge per unordered node pair; each edge
carries one mark per endpoint.  The mark characters double as the text
serialization alphabet:

    '-'  tail        (a directed edge i -> j is tail at i, arrow at j)
    '>'  arrow
    'o'  circle      (unknown orientation, e.g. undirected CPDAG edges)
    'x'  conflict    (contradictory orientation evidence)

Directed graphs, CPDAGs, ADMGs (with '>' '>' bidirected edges) and
discovery outputs with conflicts all live in this one representation.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

TAIL = "-"
ARROW = ">"
CIRCLE = "o"
CONFLICT = "x"

MARKS = (TAIL, ARROW, CIRCLE, CONFLICT)

Edge = tuple[int, int, str, str]


class MixedGraph:
    """Immutable node-indexed graph with per-endpoint edge marks."""

    __slots__ = ("n_nodes", "_edges", "latent_flags", "_adj", "_hash", "_sep_cache")

    def __init__(
        self,
        n_nodes: int,
        edges: Iterable[Edge] = (),
        latent_flags: Sequence[bool] | None = None,
    ):
        if n_nodes < 0:
            raise ValueError("n_nodes must be nonnegative")
        self.n_nodes = int(n_nodes)
        store: dict[tuple[int, int], tuple[str, str]] = {}
        adj: list[set[int]] = [set() for _ in range(self.n_nodes)]
        for i, j, mi, mj in edges:
            if not (0 <= i < n_nodes and 0 <= j < n_nodes):
                raise ValueError(f"edge ({i},{j}) out of range")
            if i == j:
                raise ValueError("self loops are not allowed")
            if mi not in MARKS or mj not in MARKS:
                raise ValueError(f"unknown mark in edge ({i},{j},{mi},{mj})")
            key = (i, j) if i < j else (j, i)
            val = (mi, mj) if i < j else (mj, mi)
            if key in store and store[key] != val:
                raise ValueError(f"duplicate edge for pair {key}")
            store[key] = val
            adj[i].add(j)
            adj[j].add(i)
        self._edges = store
        self._adj = tuple(tuple(sorted(s)) for s in adj)
        if latent_flags is not None and len(latent_flags) != self.n_nodes:
            raise ValueError("latent_flags length mismatch")
        self.latent_flags = tuple(latent_flags) if latent_flags is not None else None
        self._hash = None
        self._sep_cache = None

    # -- basic queries -------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        key = (i, j) if i < j else (j, i)
        return key in self._edges

    def edge_marks(self, i: int, j: int) -> tuple[str, str] | None:
        """Marks (at_i, at_j), or None if the pair is nonadjacent."""
        if i < j:
            return self._edges.get((i, j))
        got = self._edges.get((j, i))
        return None if got is None else (got[1], got[0])

    def adjacent(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def edges(self) -> Iterator[Edge]:
        for (i, j), (mi, mj) in sorted(self._edges.items()):
            yield i, j, mi, mj

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def has_directed_edge(self, i: int, j: int) -> bool:
        marks = self.edge_marks(i, j)
        return marks is not None and marks == (TAIL, ARROW)

    def parents(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in self._adj[i] if self.has_directed_edge(j, i))

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(j for j in self._adj[i] if self.has_directed_edge(i, j))

    def siblings(self, i: int) -> tuple[int, ...]:
        """Neighbours joined to i by a bidirected (arrow-arrow) edge."""
        out = []
        for j in self._adj[i]:
            if self.edge_marks(i, j) == (ARROW, ARROW):
                out.append(j)
        return tuple(out)

    def undirected_neighbors(self, i: int) -> tuple[int, ...]:
        out = []
        for j in self._adj[i]:
            m = self.edge_marks(i, j)
            if m in ((CIRCLE, CIRCLE), (TAIL, TAIL)):
                out.append(j)
        return tuple(out)

    def directed_edges(self) -> Iterator[tuple[int, int]]:
        for i, j, mi, mj in self.edges():
            if (mi, mj) == (TAIL, ARROW):
                yield i, j
            elif (mi, mj) == (ARROW, TAIL):
                yield j, i

    def skeleton_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._edges)

    # -- structure predicates -------------------------------------------

    def is_directed_acyclic(self) -> bool:
        """True iff the tail->arrow relation has no cycle."""
        indeg = [0] * self.n_nodes
        ch: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for i, j in self.directed_edges():
            ch[i].append(j)
            indeg[j] += 1
        queue = deque(v for v in range(self.n_nodes) if indeg[v] == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for w in ch[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return seen == self.n_nodes

    def is_dag(self) -> bool:
        for _, _, mi, mj in self.edges():
            if {mi, mj} != {TAIL, ARROW}:
                return False
        return self.is_directed_acyclic()

    def ancestors(self, nodes: Iterable[int]) -> set[int]:
        """Nodes with a directed path into any of `nodes` (inclusive)."""
        result: set[int] = set()
        stack = list(nodes)
        while stack:
            v = stack.pop()
            if v in result:
                continue
            result.add(v)
            stack.extend(self.parents(v))
        return result

    # -- transformations -------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> "MixedGraph":
        """Return the graph with node i renamed to perm[i]."""
        if sorted(perm) != list(range(self.n_nodes)):
            raise ValueError("perm must be a permutation of the nodes")
        edges = [(perm[i], perm[j], mi, mj) for i, j, mi, mj in self.edges()]
        return MixedGraph(self.n_nodes, edges)

    # -- equality / hashing ----------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MixedGraph)
            and self.n_nodes == other.n_nodes
            and self._edges == other._edges
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_nodes, tuple(sorted(self._edges.items()))))
        return self._hash

    def __repr__(self):
        return f"MixedGraph(n_nodes={self.n_nodes}, edges={list(self.edges())!r})"

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """Serialize as `nodes=N` header plus one `i <mi><mj> j` line per edge."""
        lines = [f"nodes={self.n_nodes}"]
        for i, j, mi, mj in self.edges():
            lines.append(f"{i} {mi}{mj} {j}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MixedGraph":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("nodes="):
            raise ValueError("missing 'nodes=N' header")
        n = int(lines[0].split("=", 1)[1])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3 or len(parts[1]) != 2:
                raise ValueError(f"bad edge line: {ln!r}")
            i, marks, j = int(parts[0]), parts[1], int(parts[2])
            edges.append((i, j, marks[0], marks[1]))
        return cls(n, edges)


def dag_from_edges(n_nodes: int, directed: Iterable[tuple[int, int]]) -> MixedGraph:
    """Convenience constructor for a DAG given (parent, child) pairs."""
    g = MixedGraph(n_nodes, [(i, j, TAIL, ARROW) for i, j in directed])
    if not g.is_dag():
        raise ValueError("edge set is not acyclic")
    return g


@dataclass(frozen=True)
class Partition:
    """Mapping from micro column indices to macro variable indices.

    Blocks must be contiguous in column order and cover every macro index.
    """

    micro_to_macro: tuple[int, ...]

    def __post_init__(self):
        arr = self.micro_to_macro
        if len(arr) == 0:
            raise ValueError("empty partition")
        n_macro = max(arr) + 1
        seen = set(arr)
        if seen != set(range(n_macro)):
            raise ValueError("partition must be surjective onto 0..N-1")
        # contiguity: a macro index may not reappear once the label changes
        starts: dict[int, int] = {}
        prev = None
        for pos, v in enumerate(arr):
            if v != prev:
                if v in starts:
                    raise ValueError("partition blocks must be contiguous")
                starts[v] = pos
                prev = v

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        if any(s < 1 for s in sizes):
            raise ValueError("block sizes must be >= 1")
        arr: list[int] = []
        for i, s in enumerate(sizes):
            arr.extend([i] * s)
        return cls(tuple(arr))

    @property
    def n_micro(self) -> int:
        return len(self.micro_to_macro)

    @property
    def n_macro(self) -> int:
        return max(self.micro_to_macro) + 1

    @property
    def macro_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.n_macro
        for v in self.micro_to_macro:
            sizes[v] += 1
        return tuple(sizes)

    def block_cols(self, i: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.micro_to_macro) == i)

    def cols_of(self, macro_set: Iterable[int]) -> np.ndarray:
        idx = set(macro_set)
        return np.flatnonzero([v in idx for v in self.micro_to_macro])

    def is_identity(self) -> bool:
        return self.n_micro == self.n_macro


# ---------------------------------------------------------------------------
# m-separation
# ---------------------------------------------------------------------------


def _augmented_digraph(g: MixedGraph) -> tuple[list[list[int]], list[list[int]]]:
    """Replace each bidirected edge by a fresh latent common parent.

    Returns (parents, children) adjacency lists over original nodes plus
    one virtual node per bidirected edge; virtual nodes are appended after
    the real ones and never appear in conditioning sets.
    """
    n = g.n_nodes
    parents: list[list[int]] = [[] for _ in range(n)]
    children: list[list[int]] = [[] for _ in range(n)]
    for i, j, mi, mj in g.edges():
        if (mi, mj) == (TAIL, ARROW):
            children[i].append(j)
            parents[j].append(i)
        elif (mi, mj) == (ARROW, TAIL):
            children[j].append(i)
            parents[i].append(j)
        elif (mi, mj) == (ARROW, ARROW):
            latent = len(parents)
            parents.append([])
            children.append([i, j])
            parents[i].append(latent)
            parents[j].append(latent)
        else:
            raise ValueError(
                "m-separation is defined for directed/bidirected edges only; "
                f"found marks ({mi},{mj}) on pair ({i},{j})"
            )
    return parents, children


def m_separated(
    g: MixedGraph,
    i_set: Iterable[int],
    j_set: Iterable[int],
    s: Iterable[int] = (),
) -> bool:
    """True iff every path between the two node sets is blocked given s.

    Bidirected edges are treated as double-arrow endpoints; the graph's
    directed part must be acyclic.
    """
    xs, ys, zs = set(i_set), set(j_set), set(s)
    if xs & ys or xs & zs or ys & zs:
        raise ValueError("the three node sets must be pairwise disjoint")
    if not xs or not ys:
        raise ValueError("i_set and j_set must be nonempty")
    if g._sep_cache is None:
        if not g.is_directed_acyclic():
            raise ValueError("directed part of the graph must be acyclic")
        g._sep_cache = _augmented_digraph(g)
    parents, children = g._sep_cache

    # ancestors of the conditioning set in the augmented DAG
    anc_z: set[int] = set()
    stack = list(zs)
    while stack:
        v = stack.pop()
        if v in anc_z:
            continue
        anc_z.add(v)
        stack.extend(parents[v])

    # Bayes-ball reachability from xs
    start = [(v, "up") for v in xs]
    visited: set[tuple[int, str]] = set()
    queue = deque(start)
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v in ys:
            return False
        if direction == "up":
            if v not in zs:
                for p in parents[v]:
                    queue.append((p, "up"))
                for c in children[v]:
                    queue.append((c, "down"))
        else:
            if v not in zs:
                for c in children[v]:
                    queue.append((c, "down"))
            if v in anc_z:
                for p in parents[v]:
                    queue.append((p, "up"))
    return True


# ---------------------------------------------------------------------------
# coarsening
# ---------------------------------------------------------------------------


def coarsen(g: MixedGraph, p: Partition) -> MixedGraph:
    """Quotient a micro graph to the macro level under a partition.

    A macro pair is adjacent iff some micro edge crosses the two blocks.
    The macro edge is directed iff every crossing edge is directed the
    same way; otherwise the marks fall back to the crossing edges' common
    symmetric mark (circle when mixed).  Within-block edges are dropped.
    """
    if g.n_nodes != p.n_micro:
        raise ValueError("graph nodes must equal partition micro columns")
    lab = p.micro_to_macro
    crossing: dict[tuple[int, int], list[tuple[str, str]]] = {}
    for i, j, mi, mj in g.edges():
        bi, bj = lab[i], lab[j]
        if bi == bj:
            continue
        key = (bi, bj) if bi < bj else (bj, bi)
        val = (mi, mj) if bi < bj else (mj, mi)
        crossing.setdefault(key, []).append(val)
    out: list[Edge] = []
    for (bi, bj), marks in sorted(crossing.items()):
        if all(m == (TAIL, ARROW) for m in marks):
            out.append((bi, bj, TAIL, ARROW))
        elif all(m == (ARROW, TAIL) for m in marks):
            out.append((bi, bj, ARROW, TAIL))
        elif all(m == (TAIL, TAIL) for m in marks):
            out.append((bi, bj, TAIL, TAIL))
        elif all(m == (ARROW, ARROW) for m in marks):
            out.append((bi, bj, ARROW, ARROW))
        else:
            out.append((bi, bj, CIRCLE, CIRCLE))
    return MixedGraph(p.n_macro, out)


# ---------------------------------------------------------------------------
# Meek rules and CPDAGs
# ---------------------------------------------------------------------------


class _PdagState:
    """Mutable partially directed graph used by the orientation phases.

    marks[(i, j)] with i < j mirrors MixedGraph storage.  Undirected
    discovery edges are circle-circle; conflicts are frozen.
    """

    def __init__(self, g: MixedGraph):
        self.n = g.n_nodes
        self.marks: dict[tuple[int, int], tuple[str, str]] = dict(g._edges)
        self.adj: list[set[int]] = [set(g.adjacent(i)) for i in range(self.n)]

    def get(self, i, j):
        if i < j:
            return self.marks.get((i, j))
        m = self.marks.get((j, i))
        return None if m is None else (m[1], m[0])

    def set(self, i, j, mi, mj):
        if i < j:
            self.marks[(i, j)] = (mi, mj)
        else:
            self.marks[(j, i)] = (mj, mi)

    def is_undirected(self, i, j):
        return self.get(i, j) == (CIRCLE, CIRCLE)

    def points_at(self, i, j):
        """True iff edge i -> j (tail, arrow)."""
        return self.get(i, j) == (TAIL, ARROW)

    def orient(self, i, j):
        self.set(i, j, TAIL, ARROW)

    def conflict(self, i, j):
        self.set(i, j, CONFLICT, CONFLICT)

    def is_conflict(self, i, j):
        return self.get(i, j) == (CONFLICT, CONFLICT)

    def to_graph(self) -> MixedGraph:
        return MixedGraph(
            self.n, [(i, j, mi, mj) for (i, j), (mi, mj) in self.marks.items()]
        )


def _meek_closure(st: _PdagState) -> None:
    """Apply Meek rules R1-R4 to a fixed point, never reorienting edges."""
    n = st.n
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in sorted(st.adj[i]):
                if not st.is_undirected(i, j):
                    continue
                # R1: k -> i, i o-o j, k not adjacent to j  =>  i -> j
                done = False
                for k in sorted(st.adj[i]):
                    if k != j and st.points_at(k, i) and j not in st.adj[k]:
                        st.orient(i, j)
                        changed = done = True
                        break
                if done:
                    continue
                # R2: i -> k -> j with i o-o j  =>  i -> j
                for k in sorted(st.adj[i] & st.adj[j]):
                    if st.points_at(i, k) and st.points_at(k, j):
                        st.orient(i, j)
                        changed = done = True
                        break
                if done:
                    continue
                # R3: i o-o k, i o-o l, k -> j, l -> j, k/l nonadjacent => i -> j
                shared = sorted(st.adj[i] & st.adj[j])
                for k, l in itertools.combinations(shared, 2):
                    if (
                        st.is_undirected(i, k)
                        and st.is_undirected(i, l)
                        and st.points_at(k, j)
                        and st.points_at(l, j)
                        and l not in st.adj[k]
                    ):
                        st.orient(i, j)
                        changed = done = True
                        break
                if done:
                    continue
                # R4: i o-o k (or adjacent), k -> l, l -> j, i o-o l or i o-o j,
                # with k and j nonadjacent => i -> j
                for l in sorted(st.adj[i] & st.adj[j]):
                    if not st.points_at(l, j):
                        continue
                    for k in sorted(st.adj[i] & st.adj[l]):
                        if k == j or j in st.adj[k]:
                            continue
                        if st.points_at(k, l):
                            st.orient(i, j)
                            changed = done = True
                            break
                    if done:
                        break


def apply_meek_rules(g: MixedGraph) -> MixedGraph:
    """Close a partially directed graph under Meek rules R1-R4.

    Edges already directed are never reversed; input must not contain
    conflict marks.
    """
    for _, _, mi, mj in g.edges():
        if CONFLICT in (mi, mj):
            raise ValueError("Meek rules are undefined on conflict edges")
    st = _PdagState(g)
    _meek_closure(st)
    return st.to_graph()


def cpdag_of(dag: MixedGraph) -> MixedGraph:
    """Markov equivalence class graph: skeleton, v-structures, Meek closure."""
    if not dag.is_dag():
        raise ValueError("input must be a DAG")
    st = _PdagState(
        MixedGraph(dag.n_nodes, [(i, j, CIRCLE, CIRCLE) for (i, j) in dag.skeleton_pairs()])
    )
    for j in range(dag.n_nodes):
        ps = dag.parents(j)
        for a, b in itertools.combinations(sorted(ps), 2):
            if not dag.has_edge(a, b):
                st.orient(a, j)
                st.orient(b, j)
    _meek_closure(st)
    return st.to_graph()


# ---------------------------------------------------------------------------
# acyclification
# ---------------------------------------------------------------------------


def _strongly_connected_components(n: int, children: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns component id per node."""
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    visited = [False] * n
    counter = 1
    stack: list[int] = []
    n_comps = 0
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                visited[v] = True
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for k in range(pi, len(children[v])):
                w = children[v][k]
                if not visited[w]:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comps
                    if w == v:
                        break
                n_comps += 1
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comp


def acyclify(g: MixedGraph) -> MixedGraph:
    """Collapse directed cycles into bidirected clusters.

    Nodes sharing a strongly connected component become pairwise
    bidirected; v -> w survives iff v points into w's component from
    outside it.  DAG inputs are returned unchanged.  A tail-tail edge is
    read as a reciprocal pair (i -> j and j -> i): the storage holds one
    edge per unordered pair, so two-cycles use this convention.
    """
    children: list[list[int]] = [[] for _ in range(g.n_nodes)]
    for i, j, mi, mj in g.edges():
        if (mi, mj) == (TAIL, ARROW):
            children[i].append(j)
        elif (mi, mj) == (ARROW, TAIL):
            children[j].append(i)
        elif (mi, mj) == (TAIL, TAIL):
            children[i].append(j)
            children[j].append(i)
        else:
            raise ValueError("acyclify expects a directed graph (tail/arrow marks)")
    comp = _strongly_connected_components(g.n_nodes, children)
    members: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        members.setdefault(c, []).append(v)
    edges: dict[tuple[int, int], tuple[str, str]] = {}
    for c, nodes in members.items():
        for a, b in itertools.combinations(sorted(nodes), 2):
            edges[(a, b)] = (ARROW, ARROW)
    for v in range(g.n_nodes):
        for w in children[v]:
            if comp[v] == comp[w]:
                continue
            for target in members[comp[w]]:
                key = (v, target) if v < target else (target, v)
                val = (TAIL, ARROW) if v < target else (ARROW, TAIL)
                edges[key] = val
    return MixedGraph(g.n_nodes, [(i, j, mi, mj) for (i, j), (mi, mj) in edges.items()])


# ---------------------------------------------------------------------------
# inducing paths and possible-d-separating sets
# ---------------------------------------------------------------------------


def _arrow_at(g: MixedGraph, v: int, other: int) -> bool:
    marks = g.edge_marks(v, other)
    return marks is not None and marks[0] == ARROW


def inducing_path_exists(
    g: MixedGraph, x: int, y: int, latents: Iterable[int] = ()
) -> bool:
    """True iff some path between x and y has every non-endpoint either in
    `latents` or a collider, with every collider an ancestor of x or y."""
    if x == y:
        raise ValueError("endpoints must differ")
    lat = set(latents)
    anc_xy = g.ancestors([x, y])

    def middle_ok(prev: int, v: int, nxt: int) -> bool:
        collider = _arrow_at(g, v, prev) and _arrow_at(g, v, nxt)
        if collider:
            return v in anc_xy or v in lat
        return v in lat

    # DFS over simple paths from x; check each middle as soon as completed
    stack: list[tuple[int, list[int]]] = [(x, [x])]
    while stack:
        v, path = stack.pop()
        for w in g.adjacent(v):
            if w in path:
                continue
            if len(path) >= 2 and not middle_ok(path[-2], v, w):
                continue
            if w == y:
                return True
            stack.append((w, path + [w]))
    return False


def possible_dsep_set(g: MixedGraph, x: int, z: int) -> set[int]:
    """Nodes reachable from x along paths whose every middle node is a
    collider on the subpath, or not a definite noncollider while the
    subpath endpoints are adjacent (a triangle)."""

    def definite_noncollider(v: int, prev: int, nxt: int) -> bool:
        mp = g.edge_marks(v, prev)
        mn = g.edge_marks(v, nxt)
        return (mp is not None and mp[0] == TAIL) or (mn is not None and mn[0] == TAIL)

    def middle_ok(prev: int, v: int, nxt: int) -> bool:
        if _arrow_at(g, v, prev) and _arrow_at(g, v, nxt):
            return True
        return (not definite_noncollider(v, prev, nxt)) and g.has_edge(prev, nxt)

    found: set[int] = set()
    stack: list[tuple[int, list[int]]] = [(x, [x])]
    seen_paths: set[tuple[int, ...]] = set()
    while stack:
        v, path = stack.pop()
        for w in g.adjacent(v):
            if w in path:
                continue
            if len(path) >= 2 and not middle_ok(path[-2], v, w):
                continue
            found.add(w)
            key = tuple(path + [w])
            if key not in seen_paths:
                seen_paths.add(key)
                stack.append((w, path + [w]))
    found.discard(x)
    found.discard(z)
    return found
