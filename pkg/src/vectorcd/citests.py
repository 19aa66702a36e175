"""Conditional-independence tests with a uniform decision interface.

Univariate pairs use the Fisher-z partial correlation.  Vector blocks use
either a Bonferroni-corrected max-correlation test or a covariance-measure
test whose null is simulated with a Gaussian multiplier bootstrap on
standardized residual products.  All tests regress on the conditioning
columns by OLS first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .data import Dataset

RIDGE_PENALTY = 1e-8
# residual sd below this fraction of the raw column sd counts as
# deterministic-given-z (no remaining variation to test)
DEGENERATE_SD_RATIO = 1e-8


def normal_sf(x: float) -> float:
    """Upper tail of the standard normal, accurate far into the tail."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


@dataclass(frozen=True)
class CiConfig:
    alpha: float = 0.01
    test_kind: str = "gcm"  # parcorr | maxcorr | gcm
    bootstrap_reps: int = 499
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.test_kind not in ("parcorr", "maxcorr", "gcm"):
            raise ValueError(f"unknown test kind {self.test_kind!r}")
        if self.bootstrap_reps < 100:
            raise ValueError("bootstrap_reps must be at least 100")


@dataclass(frozen=True)
class TestRecord:
    """One CI query: pair of macro index groups, conditioning set, outcome."""

    pair: tuple[tuple[int, ...], tuple[int, ...]]
    cond: tuple[int, ...]
    p_value: float
    statistic: float
    decided_independent: bool
    level: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p-value out of range")
        if self.decided_independent != (self.p_value > self.level):
            raise ValueError("decision must equal p_value > level")

    def to_json_dict(self) -> dict:
        return {
            "pair": [list(self.pair[0]), list(self.pair[1])],
            "cond": list(self.cond),
            "p_value": self.p_value,
            "statistic": self.statistic,
            "decided_independent": self.decided_independent,
            "level": self.level,
            "flags": list(self.flags),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "TestRecord":
        return cls(
            pair=(tuple(d["pair"][0]), tuple(d["pair"][1])),
            cond=tuple(d["cond"]),
            p_value=d["p_value"],
            statistic=d["statistic"],
            decided_independent=d["decided_independent"],
            level=d["level"],
            flags=tuple(d.get("flags", ())),
        )


def _as_key(x) -> tuple[int, ...]:
    if isinstance(x, (int, np.integer)):
        return (int(x),)
    return tuple(sorted(int(v) for v in x))


def record(pair_i, pair_j, cond, p, stat, cfg: CiConfig, flags=()) -> TestRecord:
    key_i, key_j = _as_key(pair_i), _as_key(pair_j)
    if key_j < key_i:
        key_i, key_j = key_j, key_i
    return TestRecord(
        pair=(key_i, key_j),
        cond=tuple(sorted(_as_key(cond))),
        p_value=float(p),
        statistic=float(stat),
        decided_independent=bool(p > cfg.alpha),
        level=cfg.alpha,
        flags=tuple(flags),
    )


def test_rng(cfg: CiConfig, pair_i, pair_j, cond) -> np.random.Generator:
    """RNG derived from (seed, pair, cond) so results are order-independent."""
    entropy = (
        int(cfg.rng_seed) & 0xFFFFFFFF,
        *(v + 1 for v in _as_key(pair_i)),
        0xA5,
        *(v + 1 for v in _as_key(pair_j)),
        0x5A,
        *(v + 1 for v in _as_key(cond)),
    )
    return np.random.default_rng(np.random.SeedSequence(entropy))


# ---------------------------------------------------------------------------
# regression
# ---------------------------------------------------------------------------


def _as_cols(block) -> np.ndarray | None:
    if block is None:
        return None
    arr = np.asarray(block, dtype=float)
    if arr.size == 0:
        return None
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def residualize(y_block: np.ndarray, z_block: np.ndarray | None) -> tuple[np.ndarray, bool]:
    """Column-wise OLS residuals of y on z plus an intercept.

    Returns (residuals, used_ridge).  Empty z yields column-centered y.
    Rank-deficient designs fall back to a tiny ridge penalty rather than
    failing; callers report the fallback in the test record.
    """
    y = _as_cols(y_block)
    if y is None:
        raise ValueError("y_block must be nonempty")
    n = y.shape[0]
    z = _as_cols(z_block)
    if z is None:
        return y - y.mean(axis=0, keepdims=True), False
    if z.shape[0] != n:
        raise ValueError("y and z must have the same number of rows")
    design = np.column_stack([np.ones(n), z])
    k = design.shape[1]
    gram = design.T @ design
    rhs = design.T @ y
    try:
        rank = np.linalg.matrix_rank(gram, hermitian=True)
        if rank < k:
            raise np.linalg.LinAlgError
        beta = np.linalg.solve(gram, rhs)
        used_ridge = False
    except np.linalg.LinAlgError:
        beta = np.linalg.solve(gram + RIDGE_PENALTY * np.eye(k), rhs)
        used_ridge = True
    return y - design @ beta, used_ridge


def _resid_profile(block: np.ndarray, z: np.ndarray | None):
    """Residuals plus a per-column flag for deterministic-given-z columns."""
    resid, ridge = residualize(block, z)
    raw_sd = block.std(axis=0)
    res_sd = resid.std(axis=0)
    degenerate = res_sd <= DEGENERATE_SD_RATIO * np.maximum(raw_sd, 1e-300)
    return resid - resid.mean(axis=0, keepdims=True), res_sd, degenerate, ridge


def _corr_from_resid(a, sa, b, sb, n) -> float:
    return float(a @ b) / (n * sa * sb)


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------


def _check_sample_size(n: int, z: np.ndarray | None):
    n_z = 0 if z is None else z.shape[1]
    if n <= n_z + 3:
        raise ValueError("need more samples than conditioning columns plus 3")
    return n_z


def fisher_z_parcorr(
    x: np.ndarray, y: np.ndarray, z_block: np.ndarray | None, cfg: CiConfig, pair=(0, 1), cond=()
) -> TestRecord:
    """Partial-correlation test via the Fisher z transform."""
    x = _as_cols(np.asarray(x, dtype=float).reshape(-1))
    y = _as_cols(np.asarray(y, dtype=float).reshape(-1))
    z = _as_cols(z_block)
    n = x.shape[0]
    n_z = _check_sample_size(n, z)
    rx, sx, deg_x, ridge_x = _resid_profile(x, z)
    ry, sy, deg_y, ridge_y = _resid_profile(y, z)
    flags = []
    if ridge_x or ridge_y:
        flags.append("ridge")
    if deg_x[0] or deg_y[0]:
        # no remaining variation: nothing left to correlate
        flags.append("degenerate")
        return record(pair[0], pair[1], cond, 1.0, 0.0, cfg, flags)
    r = _corr_from_resid(rx[:, 0], sx[0], ry[:, 0], sy[0], n)
    r = max(-1.0, min(1.0, r))
    if abs(r) >= 1.0 - 1e-15:
        flags.append("saturated")
        return record(pair[0], pair[1], cond, 0.0, math.inf, cfg, flags)
    stat = math.sqrt(n - n_z - 3) * abs(math.atanh(r))
    p = min(1.0, 2.0 * normal_sf(stat))
    return record(pair[0], pair[1], cond, p, stat, cfg, flags)


def max_corr_test(
    x_block: np.ndarray,
    y_block: np.ndarray,
    z_block: np.ndarray | None,
    cfg: CiConfig,
    pair=(0, 1),
    cond=(),
) -> TestRecord:
    """Bonferroni-corrected maximum pairwise residual correlation."""
    x = _as_cols(x_block)
    y = _as_cols(y_block)
    z = _as_cols(z_block)
    n = x.shape[0]
    n_z = _check_sample_size(n, z)
    rx, sx, deg_x, ridge_x = _resid_profile(x, z)
    ry, sy, deg_y, ridge_y = _resid_profile(y, z)
    flags = ["ridge"] if (ridge_x or ridge_y) else []
    if np.any(deg_x) or np.any(deg_y):
        flags.append("degenerate")
    dx, dy = x.shape[1], y.shape[1]
    scale = math.sqrt(n - n_z - 3)
    best_stat = 0.0
    min_p = 1.0
    saturated = False
    for a in range(dx):
        if deg_x[a]:
            continue
        for b in range(dy):
            if deg_y[b]:
                continue
            r = max(-1.0, min(1.0, _corr_from_resid(rx[:, a], sx[a], ry[:, b], sy[b], n)))
            best_stat = max(best_stat, abs(r))
            if abs(r) >= 1.0 - 1e-15:
                saturated = True
            else:
                min_p = min(min_p, 2.0 * normal_sf(scale * abs(math.atanh(r))))
    if saturated:
        flags.append("saturated")
        return record(pair[0], pair[1], cond, 0.0, 1.0, cfg, flags)
    p = min(1.0, dx * dy * min_p)
    return record(pair[0], pair[1], cond, p, best_stat, cfg, flags)


# bootstrap matrices larger than this many floats switch to float32
_GCM_F32_CUTOFF = 4.0e7


def gcm_test(
    x_block: np.ndarray,
    y_block: np.ndarray,
    z_block: np.ndarray | None,
    cfg: CiConfig,
    pair=(0, 1),
    cond=(),
) -> TestRecord:
    """Covariance-measure test over residual products.

    Statistic: S = max_{jk} |sqrt(n) mean(R_jk) / sd(R_jk)| over products
    R_jk(t) = r_x^j(t) r_y^k(t).  The p-value is the tail probability of
    the same max functional under standard-normal multipliers applied to
    the centered, standardized products, with cfg.bootstrap_reps draws.
    """
    x = _as_cols(x_block)
    y = _as_cols(y_block)
    z = _as_cols(z_block)
    n = x.shape[0]
    _check_sample_size(n, z)
    rx, sx, deg_x, ridge_x = _resid_profile(x, z)
    ry, sy, deg_y, ridge_y = _resid_profile(y, z)
    flags = ["ridge"] if (ridge_x or ridge_y) else []

    keep_x = np.flatnonzero(~deg_x)
    keep_y = np.flatnonzero(~deg_y)
    if keep_x.size < rx.shape[1] or keep_y.size < ry.shape[1]:
        flags.append("degenerate_products_excluded")
    if keep_x.size == 0 or keep_y.size == 0:
        flags.append("all_products_degenerate")
        return record(pair[0], pair[1], cond, 1.0, 0.0, cfg, flags)
    rx = rx[:, keep_x]
    ry = ry[:, keep_y]

    prods = (rx[:, :, None] * ry[:, None, :]).reshape(n, -1)
    mean = prods.mean(axis=0)
    sd = prods.std(axis=0, ddof=0)
    keep = sd > DEGENERATE_SD_RATIO * np.maximum(np.abs(mean), 1e-300)
    if not np.any(keep):
        flags.append("all_products_degenerate")
        return record(pair[0], pair[1], cond, 1.0, 0.0, cfg, flags)
    if not np.all(keep):
        flags.append("degenerate_products_excluded")
        prods, mean, sd = prods[:, keep], mean[keep], sd[keep]
    t_stats = math.sqrt(n) * mean / sd
    statistic = float(np.max(np.abs(t_stats)))

    standardized = (prods - mean) / sd
    reps = cfg.bootstrap_reps
    rng = test_rng(cfg, pair[0], pair[1], cond)
    if standardized.size * reps > _GCM_F32_CUTOFF:
        standardized = standardized.astype(np.float32)
        mults = rng.standard_normal((n, reps), dtype=np.float32)
    else:
        mults = rng.standard_normal((n, reps))
    boot = np.abs(standardized.T @ mults).max(axis=0) / math.sqrt(n)
    p = (1.0 + float(np.sum(boot >= statistic))) / (reps + 1.0)
    return record(pair[0], pair[1], cond, p, statistic, cfg, flags)


def ci_dispatch(dataset: Dataset, i, j, cond: Iterable[int], cfg: CiConfig) -> TestRecord:
    """Run the configured CI test on macro variables i, j given `cond`.

    i and j may be single macro indices or sets of them; conditioning
    columns are the union of the blocks in `cond`.  The partial
    correlation test is used whenever every involved block is univariate,
    otherwise cfg.test_kind decides.
    """
    key_i, key_j = _as_key(i), _as_key(j)
    cond_t = tuple(sorted(_as_key(cond)))
    if set(key_i) & set(key_j):
        raise ValueError("tested variable groups must be disjoint")
    overlap = (set(key_i) | set(key_j)) & set(cond_t)
    if overlap:
        raise ValueError(f"conditioning set overlaps tested variables: {sorted(overlap)}")
    part = dataset.partition
    x = dataset.X[:, part.cols_of(key_i)]
    y = dataset.X[:, part.cols_of(key_j)]
    z_cols = part.cols_of(cond_t)
    z = dataset.X[:, z_cols] if z_cols.size else None
    widths = dataset.widths
    involved = list(key_i) + list(key_j) + list(cond_t)
    if all(widths[v] == 1 for v in involved):
        return fisher_z_parcorr(x[:, 0], y[:, 0], z, cfg, pair=(key_i, key_j), cond=cond_t)
    if cfg.test_kind == "maxcorr":
        return max_corr_test(x, y, z, cfg, pair=(key_i, key_j), cond=cond_t)
    if cfg.test_kind == "gcm":
        return gcm_test(x, y, z, cfg, pair=(key_i, key_j), cond=cond_t)
    raise ValueError("parcorr cannot test multivariate blocks; configure maxcorr or gcm")
