"""Synthetic data generators: linear vector SCMs with selectable internal
dynamics, the three-variable confounder benchmark, a spatially aggregated
VAR model, and the two fixed counterexample systems.

Every generator is a pure function of its spec and seed: equal inputs
give bit-identical datasets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .aggregation import TunableAggregationMap
from .data import Dataset
from .graphs import ARROW, TAIL, MixedGraph, Partition, coarsen, m_separated

log = logging.getLogger(__name__)

COEF_DEAD_ZONE = 0.05

INTERNAL_KINDS = ("mrf", "dag", "latent_confounded", "cyclic", "deterministic")


@dataclass(frozen=True)
class VectorScmSpec:
    d_macro: int = 5
    d_micro: int = 5
    ext_density: float = 0.5
    int_density: float = 0.5
    coef_low: float = 0.0  # lower end of the coefficient interval, in [-0.5, 0]
    coef_high: float = 0.5
    internal_kind: str = "mrf"
    pc_weight: float = 0.0
    tau_max: int = 0
    n: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.d_macro < 2:
            raise ValueError("need at least 2 macro variables")
        if self.d_micro < 1:
            raise ValueError("blocks need at least 1 component")
        for dens in (self.ext_density, self.int_density):
            if not 0.0 <= dens <= 1.0:
                raise ValueError("densities must lie in [0, 1]")
        if not -0.5 <= self.coef_low <= 0.0:
            raise ValueError("coef_low must lie in [-0.5, 0]")
        if self.internal_kind not in INTERNAL_KINDS:
            raise ValueError(f"unknown internal kind {self.internal_kind!r}")
        if self.pc_weight < 0:
            raise ValueError("pc_weight must be nonnegative")

    @classmethod
    def from_symmetry(cls, symmetry: float, **kwargs) -> "VectorScmSpec":
        """Spec whose coefficient interval is [-0.5*symmetry, 0.5]."""
        if not 0.0 <= symmetry <= 1.0:
            raise ValueError("symmetry must lie in [0, 1]")
        return cls(coef_low=-0.5 * symmetry, **kwargs)


def _draw_coef(rng: np.random.Generator, low: float, high: float) -> float:
    """Uniform draw from [low, high] avoiding the dead zone around zero."""
    for _ in range(1000):
        c = float(rng.uniform(low, high))
        if abs(c) >= COEF_DEAD_ZONE:
            return c
    return COEF_DEAD_ZONE  # interval almost degenerate; clamp


def random_macro_dag(spec: VectorScmSpec) -> MixedGraph:
    """DAG over macro variables: random causal order, each order-respecting
    pair linked with probability 1/(d_macro - 1)."""
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 0xD06)))
    return _random_macro_dag(rng, spec.d_macro)


def _random_macro_dag(rng: np.random.Generator, d_macro: int) -> MixedGraph:
    order = rng.permutation(d_macro)
    p = 1.0 / (d_macro - 1)
    edges = []
    for a in range(d_macro):
        for b in range(a + 1, d_macro):
            if rng.random() < p:
                edges.append((int(order[a]), int(order[b]), TAIL, ARROW))
    return MixedGraph(d_macro, edges)


@dataclass
class _ScmModel:
    """Linear system X = B X + F z with z iid standard normal."""

    spec: VectorScmSpec
    macro_dag: MixedGraph
    B: np.ndarray
    noise_factors: list[np.ndarray]  # per block: (d_i, k_i)
    micro_truth: MixedGraph
    truth: MixedGraph

    def noise_cov(self) -> np.ndarray:
        blocks = [F @ F.T for F in self.noise_factors]
        d = sum(b.shape[0] for b in blocks)
        out = np.zeros((d, d))
        at = 0
        for b in blocks:
            k = b.shape[0]
            out[at : at + k, at : at + k] = b
            at += k
        return out

    def covariance(self) -> np.ndarray:
        """Exact joint covariance of the equilibrium solution (static case)."""
        d = self.B.shape[0]
        inv = np.linalg.inv(np.eye(d) - self.B)
        return inv @ self.noise_cov() @ inv.T


def _build_scm(spec: VectorScmSpec) -> _ScmModel:
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 0xD06)))
    d_mac, d_mic = spec.d_macro, spec.d_micro
    macro = _random_macro_dag(rng, d_mac)
    d_tot = d_mac * d_mic
    cols = lambda i: range(i * d_mic, (i + 1) * d_mic)
    B = np.zeros((d_tot, d_tot))
    noise_factors: list[np.ndarray] = []
    extra_marks: list[tuple[int, int, str, str]] = []

    # internal dynamics first: cross mechanisms may reference the noise
    # covariance of the parent block
    for i in range(d_mac):
        base = i * d_mic
        kind = spec.internal_kind
        if kind == "mrf":
            A = np.zeros((d_mic, d_mic))
            for a in range(d_mic):
                for b in range(a + 1, d_mic):
                    if rng.random() < spec.int_density:
                        A[a, b] = A[b, a] = 1.0
                        extra_marks.append((base + a, base + b, TAIL, TAIL))
            lam = 0.3
            while True:
                prec = np.eye(d_mic) + lam * A
                vals = np.linalg.eigvalsh(prec)
                if vals[0] > 1e-8 and vals[-1] / vals[0] <= 100.0:
                    break
                lam /= 2.0
                log.info("halving mrf coupling to %.4f for positive definiteness", lam)
            cov = np.linalg.inv(prec)
            noise_factors.append(np.linalg.cholesky(cov))
        elif kind == "dag":
            order = rng.permutation(d_mic)
            for a in range(d_mic):
                for b in range(a + 1, d_mic):
                    if rng.random() < spec.int_density:
                        src, dst = int(order[a]), int(order[b])
                        B[base + dst, base + src] = _draw_coef(rng, spec.coef_low, spec.coef_high)
            noise_factors.append(np.eye(d_mic))
        elif kind == "latent_confounded":
            n_lat = max(1, int(round(spec.int_density * d_mic)))
            L = np.zeros((d_mic, n_lat))
            for l in range(n_lat):
                k = max(2, 1 + int(rng.binomial(d_mic - 1, spec.int_density)))
                members = rng.choice(d_mic, size=min(k, d_mic), replace=False)
                for a in members:
                    L[a, l] = _draw_coef(rng, spec.coef_low, spec.coef_high) * 2.0
                for ai in range(len(members)):
                    for bi in range(ai + 1, len(members)):
                        a, b = int(members[ai]), int(members[bi])
                        extra_marks.append((base + min(a, b), base + max(a, b), ARROW, ARROW))
            order = rng.permutation(d_mic)
            for a in range(d_mic):
                for b in range(a + 1, d_mic):
                    if rng.random() < spec.int_density / 2.0:
                        src, dst = int(order[a]), int(order[b])
                        B[base + dst, base + src] = _draw_coef(rng, spec.coef_low, spec.coef_high)
            noise_factors.append(np.column_stack([L, np.eye(d_mic)]))
        elif kind == "cyclic":
            Bi = np.zeros((d_mic, d_mic))
            for a in range(d_mic):
                for b in range(d_mic):
                    if a != b and rng.random() < spec.int_density:
                        Bi[b, a] = _draw_coef(rng, spec.coef_low, spec.coef_high)
            rad = max(np.abs(np.linalg.eigvals(Bi)))
            if rad >= 0.9:
                Bi *= 0.45 / rad
            B[np.ix_(list(cols(i)), list(cols(i)))] = Bi
            noise_factors.append(np.eye(d_mic))
        else:  # deterministic
            for a in range(1, d_mic):
                B[base + a, base] = _draw_coef(rng, spec.coef_low, spec.coef_high)
            F = np.zeros((d_mic, 1))
            F[0, 0] = 1.0
            noise_factors.append(F)

    # cross mechanisms along macro edges
    for i, j, _, _ in macro.edges():
        src, dst = (i, j) if macro.edge_marks(i, j) == (TAIL, ARROW) else (j, i)
        for a in cols(src):
            for b in cols(dst):
                if rng.random() < spec.ext_density:
                    B[b, a] = _draw_coef(rng, spec.coef_low, spec.coef_high)
        if spec.pc_weight > 0:
            F = noise_factors[src]
            cov = F @ F.T
            vals, vecs = np.linalg.eigh(cov)
            v1 = vecs[:, -1]
            lead = np.argmax(np.abs(v1))
            if v1[lead] < 0:
                v1 = -v1
            target = int(rng.integers(spec.d_micro))
            B[dst * d_mic + target, src * d_mic : (src + 1) * d_mic] += spec.pc_weight * v1

    micro_edges: dict[tuple[int, int], tuple[str, str]] = {}
    for bcol in range(d_tot):
        for acol in range(d_tot):
            if B[bcol, acol] == 0.0:
                continue
            lo, hi = min(acol, bcol), max(acol, bcol)
            if B[acol, bcol] != 0.0:
                micro_edges[(lo, hi)] = (TAIL, TAIL)  # reciprocal pair
            elif acol < bcol:
                micro_edges[(lo, hi)] = (TAIL, ARROW)
            else:
                micro_edges[(lo, hi)] = (ARROW, TAIL)
    for a, b, ma, mb in extra_marks:
        key = (min(a, b), max(a, b))
        if key not in micro_edges:
            micro_edges[key] = (ma, mb) if a < b else (mb, ma)
    micro_truth = MixedGraph(
        d_tot, [(a, b, m[0], m[1]) for (a, b), m in micro_edges.items()]
    )
    part = Partition.from_sizes([d_mic] * d_mac)
    truth = coarsen(micro_truth, part)
    return _ScmModel(spec, macro, B, noise_factors, micro_truth, truth)


def _sample_noise(model: _ScmModel, n: int, rng: np.random.Generator) -> np.ndarray:
    cols = []
    for F in model.noise_factors:
        z = rng.standard_normal((n, F.shape[1]))
        cols.append(z @ F.T)
    return np.column_stack(cols)


def gen_vector_scm(spec: VectorScmSpec) -> tuple[Dataset, MixedGraph, MixedGraph]:
    """Sample a linear vector SCM.

    Returns (dataset, macro truth, micro truth); the macro truth is the
    coarsening of the micro truth by construction.  tau_max > 0 runs the
    same coefficients as a stationary lag-1 process (cross effects at lag
    1, internal structure contemporaneous).
    """
    model = _build_scm(spec)
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 0x5A11)))
    d = model.B.shape[0]
    part = Partition.from_sizes([spec.d_micro] * spec.d_macro)
    if spec.tau_max == 0:
        eta = _sample_noise(model, spec.n, rng)
        X = np.linalg.solve(np.eye(d) - model.B, eta.T).T
        return Dataset(X, part), model.truth, model.micro_truth
    # lagged regime: split coefficients into within-block (contemporaneous)
    # and cross-block (lag 1) parts
    mask = np.zeros_like(model.B, dtype=bool)
    for i in range(spec.d_macro):
        sl = slice(i * spec.d_micro, (i + 1) * spec.d_micro)
        mask[sl, sl] = True
    B_int = np.where(mask, model.B, 0.0)
    B_cross = np.where(mask, 0.0, model.B)
    inv_int = np.linalg.inv(np.eye(d) - B_int)
    A = inv_int @ B_cross
    rad = max(np.abs(np.linalg.eigvals(A)))
    if rad >= 0.95:
        B_cross *= 0.9 / rad
        A = inv_int @ B_cross
        log.info("rescaled lagged coefficients for stationarity (radius %.3f)", rad)
    burn = 200
    eta = _sample_noise(model, spec.n + burn, rng)
    X = np.zeros((spec.n + burn, d))
    prev = np.zeros(d)
    for t in range(spec.n + burn):
        prev = inv_int @ (B_cross @ prev + eta[t])
        X[t] = prev
    return Dataset(X[burn:], part), model.truth, model.micro_truth


def population_covariance(spec: VectorScmSpec) -> np.ndarray:
    """Exact joint micro covariance of the static model for a spec."""
    if spec.tau_max != 0:
        raise ValueError("population covariance is defined for the static case")
    return _build_scm(spec).covariance()


def micro_admg(spec: VectorScmSpec) -> tuple[MixedGraph, MixedGraph]:
    """(micro graph, macro truth) of a latent-confounded instance."""
    model = _build_scm(spec)
    return model.micro_truth, model.truth


def is_vector_faithful(spec: VectorScmSpec, tol: float = 1e-7) -> bool:
    """Whether the block-level independence model matches the macro graph.

    Sparse micro draws can route a macro edge's influence through block
    components that never reconnect (the blocks end up independent
    although the macro graph d-connects them).  Oracle-equivalence
    experiments require instances where every macro d-connection carries
    actual dependence; this checks all pair/subset statements against
    the exact joint covariance.
    """
    import itertools as _it

    model = _build_scm(spec)
    cov = model.covariance()
    n = spec.d_macro
    d = spec.d_micro
    cols = [np.arange(i * d, (i + 1) * d) for i in range(n)]
    for i, j in _it.combinations(range(n), 2):
        rest = [v for v in range(n) if v not in (i, j)]
        for r in range(len(rest) + 1):
            for S in _it.combinations(rest, r):
                sep = m_separated(model.truth, {i}, {j}, set(S))
                c = np.concatenate([cols[s] for s in S]) if S else np.arange(0)
                stat = _partial_cross_max(cov, cols[i], cols[j], c)
                if (stat < tol) != sep:
                    return False
    return True


def _partial_cross_max(cov, a, b, c) -> float:
    s_ab = cov[np.ix_(a, b)]
    s_aa = cov[np.ix_(a, a)]
    s_bb = cov[np.ix_(b, b)]
    if len(c):
        inv = np.linalg.pinv(cov[np.ix_(c, c)], hermitian=True)
        s_ab = s_ab - cov[np.ix_(a, c)] @ inv @ cov[np.ix_(b, c)].T
        s_aa = s_aa - cov[np.ix_(a, c)] @ inv @ cov[np.ix_(a, c)].T
        s_bb = s_bb - cov[np.ix_(b, c)] @ inv @ cov[np.ix_(b, c)].T
    da = np.sqrt(np.clip(np.diag(s_aa), 0.0, None))
    db = np.sqrt(np.clip(np.diag(s_bb), 0.0, None))
    denom = np.outer(da, db)
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(denom > 0, np.abs(s_ab) / denom, 0.0)
    return float(corr.max(initial=0.0))


def spine_micro(macro: MixedGraph, d_micros: Sequence[int]) -> MixedGraph:
    """Sparse separation-faithful micro realization of a macro DAG.

    Each block is a directed chain over its components; each macro edge
    becomes one micro edge from the source block's last component to the
    target block's first component.  Entering every block at its first
    component keeps block-level collider behaviour aligned with the macro
    graph, so block-level separation statements match macro d-separation
    while the micro graph stays sparse enough for fast skeleton searches.
    """
    if not macro.is_dag():
        raise ValueError("macro graph must be a DAG")
    if len(d_micros) != macro.n_nodes:
        raise ValueError("one block width per macro node required")
    base = [0]
    for d in d_micros:
        base.append(base[-1] + d)
    edges = []
    for i, d in enumerate(d_micros):
        for a in range(d - 1):
            edges.append((base[i] + a, base[i] + a + 1, TAIL, ARROW))
    for i, j in macro.directed_edges():
        edges.append((base[i] + d_micros[i] - 1, base[j], TAIL, ARROW))
    return MixedGraph(base[-1], edges)


def blowup_micro(macro: MixedGraph, d_micro: int) -> MixedGraph:
    """Fully coupled micro realization of a macro DAG.

    Each block carries a complete internal DAG in component order and
    every macro edge is realized by all cross component pairs.  The
    block-level separation statements of this graph coincide exactly
    with the macro d-separations, which makes it the reference instance
    family for oracle-soundness experiments.
    """
    if not macro.is_dag():
        raise ValueError("macro graph must be a DAG")
    n = macro.n_nodes
    edges = []
    for i in range(n):
        base = i * d_micro
        for a in range(d_micro):
            for b in range(a + 1, d_micro):
                edges.append((base + a, base + b, TAIL, ARROW))
    for i, j in macro.directed_edges():
        for a in range(d_micro):
            for b in range(d_micro):
                edges.append((i * d_micro + a, j * d_micro + b, TAIL, ARROW))
    return MixedGraph(n * d_micro, edges)


# ---------------------------------------------------------------------------
# confounder benchmark
# ---------------------------------------------------------------------------


def gen_confounder_xyz(
    dims: tuple[int, int],
    coef: float,
    z_int: str | int | None = None,
    n_conf: str = "high",
    n: int = 1000,
    seed: int = 0,
) -> Dataset:
    """Common-cause system X <- Z -> Y with multivariate blocks.

    Columns are ordered X block, Y block, Z block.  `z_int` couples a
    shared source into the leading Z components ('high' = all, 'low' = a
    third, or an explicit count); `n_conf` picks how many Z components
    drive X and Y.  With coef = 0 the ground truth satisfies X _||_ Y | Z,
    which is the null case for size calibration; coef feeds X into Y.
    """
    d_xy, d_z = dims
    if d_xy < 1:
        raise ValueError("X and Y need at least one component")
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n, 2 * d_xy + d_z))
    confounder = rng.standard_normal((n, 1))
    if z_int:
        if isinstance(z_int, str):
            if z_int == "high":
                data[:, 2 * d_xy :] += confounder
            elif z_int == "low":
                num_int = int(d_z / 3)
                data[:, 2 * d_xy : 2 * d_xy + num_int] += confounder
            else:
                raise ValueError("z_int must be 'high', 'low', an int, or None")
        else:
            data[:, 2 * d_xy : 2 * d_xy + int(z_int)] += confounder
    if n_conf == "high":
        k_conf = d_z
    elif n_conf == "low":
        if d_z > 2:
            k_conf = int(d_z / 3)
        elif d_z > 0:
            k_conf = 1
        else:
            raise ValueError("dim_z must be greater than zero for confounder data")
    else:
        raise ValueError("n_conf should be in ['high', 'low']")
    if d_z == 0:
        raise ValueError("dim_z must be greater than zero for confounder data")
    shared = data[:, 2 * d_xy : 2 * d_xy + k_conf].mean(axis=1).reshape(n, 1)
    data[:, 0:d_xy] += shared
    data[:, d_xy : 2 * d_xy] += shared
    data[:, d_xy : 2 * d_xy] += coef * data[:, 0:d_xy]
    return Dataset(
        data, Partition.from_sizes([d_xy, d_xy, d_z]), ("X", "Y", "Z")
    )


# ---------------------------------------------------------------------------
# spatially aggregated VAR
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SavarSpec:
    n_modes: int = 3
    grid_side: int = 7
    links: tuple[tuple[int, int, float], ...] = ((0, 1, 0.35), (0, 2, 0.35))
    autocorr: tuple[float, ...] = ()
    noise_scale: float = 0.35
    mode_noise_scale: float = 1.0
    n: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("need at least one mode")
        for s, t, _ in self.links:
            if not (0 <= s < self.n_modes and 0 <= t < self.n_modes):
                raise ValueError("link endpoints out of range")
        if self.autocorr and len(self.autocorr) != self.n_modes:
            raise ValueError("one autocorrelation per mode required")

    @property
    def d_micro(self) -> int:
        return self.grid_side * self.grid_side

    def var_matrix(self) -> np.ndarray:
        phi = np.zeros((self.n_modes, self.n_modes))
        auto = self.autocorr if self.autocorr else (0.4,) * self.n_modes
        for i, a in enumerate(auto):
            phi[i, i] = a
        for s, t, c in self.links:
            phi[t, s] = c
        return phi


def savar_weights(spec: SavarSpec) -> np.ndarray:
    """Per-mode nonnegative weight rows over the mode's own grid, sum 1.

    Each row is a truncated 2-D Gaussian bump centered on the grid.
    """
    side = spec.grid_side
    sigma = max(side / 4.0, 1.0)
    center = (side - 1) / 2.0
    r = np.arange(side)
    bump = np.exp(-((r[:, None] - center) ** 2 + (r[None, :] - center) ** 2) / (2 * sigma**2))
    w = bump.ravel()
    w = w / w.sum()
    return np.tile(w, (spec.n_modes, 1))


def savar_truth(spec: SavarSpec) -> MixedGraph:
    """Ground-truth graph over (mode, lag) nodes for a one-lag window:
    lag-0 nodes come first, lag-1 nodes follow."""
    n = spec.n_modes
    phi = spec.var_matrix()
    edges = []
    for t in range(n):
        for s in range(n):
            if phi[t, s] != 0.0:
                edges.append((n + s, t, TAIL, ARROW))
    return MixedGraph(2 * n, edges)


def gen_savar(spec: SavarSpec) -> tuple[Dataset, MixedGraph]:
    """Grid-level data from mode-level lag-1 dynamics.

    Modes evolve as y_t = Phi y_{t-1} + eps_t; each mode's grid block is
    its weight row's pseudo-inverse image plus grid noise, so applying
    the weight row to noiseless grid data recovers the mode exactly.
    Unstable dynamics are rejected.
    """
    phi = spec.var_matrix()
    rad = max(np.abs(np.linalg.eigvals(phi)))
    if rad >= 1.0:
        raise ValueError(f"VAR dynamics unstable (spectral radius {rad:.3f})")
    rng = np.random.default_rng(np.random.SeedSequence((spec.seed, 0x5A7A)))
    burn = 200
    T = spec.n + burn
    modes = np.zeros((T, spec.n_modes))
    y = np.zeros(spec.n_modes)
    for t in range(T):
        y = phi @ y + spec.mode_noise_scale * rng.standard_normal(spec.n_modes)
        modes[t] = y
    modes = modes[burn:]
    W = savar_weights(spec)
    blocks = []
    for k in range(spec.n_modes):
        w = W[k]
        w_pinv = w / float(w @ w)
        grid = np.outer(modes[:, k], w_pinv)
        grid += spec.noise_scale * rng.standard_normal(grid.shape)
        blocks.append(grid)
    X = np.column_stack(blocks)
    part = Partition.from_sizes([spec.d_micro] * spec.n_modes)
    names = tuple(f"M{k}" for k in range(spec.n_modes))
    return Dataset(X, part, names), savar_truth(spec)


# ---------------------------------------------------------------------------
# fixed counterexample systems
# ---------------------------------------------------------------------------


def gen_counterexample(
    which: str, n: int = 10000, seed: int = 0, alpha: float = 0.7, beta: float = 0.4
) -> tuple[Dataset, TunableAggregationMap]:
    """The two fixed systems with their violating aggregation maps.

    'agg_faithfulness': X2 = (alpha, beta) X1 + noise with the tuned map
    Z2 = -beta X2_1 + alpha X2_2, which manufactures Z1 _||_ Z2 although
    X1 and X2 are dependent.
    'agg_sufficiency': X2 and X3 each load (1, 2) on the two components
    of X1; the map Z1 = X1_1 + X1_2 loses the direction that separates
    them, so Z2 and Z3 stay dependent given Z1 although X2 _||_ X3 | X1.
    """
    if n < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xCE)))
    if which == "agg_faithfulness":
        x1 = rng.standard_normal((n, 1))
        eta = rng.standard_normal((n, 2))
        x2 = np.column_stack([alpha * x1[:, 0], beta * x1[:, 0]]) + eta
        data = np.column_stack([x1, x2])
        ds = Dataset(data, Partition.from_sizes([1, 2]), ("X1", "X2"))
        mapping = TunableAggregationMap(
            kind="weighted_average",
            m=(1, 1),
            weights=(np.array([[1.0]]), np.array([[-beta, alpha]])),
        )
        return ds, mapping
    if which == "agg_sufficiency":
        x1 = rng.standard_normal((n, 2))
        s = x1[:, 0] + 2.0 * x1[:, 1]
        x2 = s + rng.standard_normal(n)
        x3 = s + rng.standard_normal(n)
        data = np.column_stack([x1, x2, x3])
        ds = Dataset(data, Partition.from_sizes([2, 1, 1]), ("X1", "X2", "X3"))
        mapping = TunableAggregationMap(
            kind="weighted_average",
            m=(1, 1, 1),
            weights=(np.array([[1.0, 1.0]]), np.array([[1.0]]), np.array([[1.0]])),
        )
        return ds, mapping
    raise ValueError(f"unknown counterexample {which!r}")


def counterexample_covariance(which: str, alpha: float = 0.7, beta: float = 0.4) -> np.ndarray:
    """Exact joint covariance of a counterexample system's micro columns."""
    if which == "agg_faithfulness":
        return np.array(
            [
                [1.0, alpha, beta],
                [alpha, alpha**2 + 1.0, alpha * beta],
                [beta, alpha * beta, beta**2 + 1.0],
            ]
        )
    if which == "agg_sufficiency":
        # columns: X1_1, X1_2, X2, X3 with s = X1_1 + 2 X1_2
        return np.array(
            [
                [1.0, 0.0, 1.0, 1.0],
                [0.0, 1.0, 2.0, 2.0],
                [1.0, 2.0, 6.0, 5.0],
                [1.0, 2.0, 5.0, 6.0],
            ]
        )
    raise ValueError(f"unknown counterexample {which!r}")
