"""Exact CI backends used for oracle runs and population-level checks.

Both backends expose the same call signature as the finite-sample
dispatcher: (dataset, i, j, cond, cfg) -> TestRecord, so discovery and
scoring code can swap them in for data-based testing.
"""

from __future__ import annotations

import numpy as np

from .citests import CiConfig, TestRecord, _as_key, record
from .data import Dataset
from .graphs import MixedGraph, m_separated


class GraphOracleCi:
    """Answers CI queries by m-separation on a known ground-truth graph.

    Macro index k maps to graph node k; the dataset argument is only used
    for its partition arity.
    """

    def __init__(self, truth: MixedGraph):
        self.truth = truth

    def __call__(self, dataset: Dataset, i, j, cond, cfg: CiConfig) -> TestRecord:
        key_i, key_j = _as_key(i), _as_key(j)
        sep = m_separated(self.truth, key_i, key_j, _as_key(cond))
        p = 1.0 if sep else 0.0
        return record(key_i, key_j, cond, p, 0.0 if sep else np.inf, cfg, ("oracle",))


class GaussianCovCi:
    """Exact CI for linear-Gaussian systems from a population covariance.

    Blocks A and B are independent given C iff the partial cross
    covariance Sigma_AB - Sigma_AC Sigma_CC^-1 Sigma_CB vanishes; entries
    are compared on a correlation scale against `tol`.
    """

    def __init__(self, cov: np.ndarray, tol: float = 1e-7):
        cov = np.asarray(cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be square")
        self.cov = cov
        self.tol = tol

    def partial_cross_max(self, a_cols, b_cols, c_cols) -> float:
        cov = self.cov
        a = np.asarray(a_cols, dtype=int)
        b = np.asarray(b_cols, dtype=int)
        c = np.asarray(c_cols, dtype=int)
        s_ab = cov[np.ix_(a, b)]
        s_aa = cov[np.ix_(a, a)]
        s_bb = cov[np.ix_(b, b)]
        if c.size:
            s_cc = cov[np.ix_(c, c)]
            s_ac = cov[np.ix_(a, c)]
            s_bc = cov[np.ix_(b, c)]
            solve = np.linalg.pinv(s_cc, hermitian=True)
            s_ab = s_ab - s_ac @ solve @ s_bc.T
            s_aa = s_aa - s_ac @ solve @ s_ac.T
            s_bb = s_bb - s_bc @ solve @ s_bc.T
        da = np.sqrt(np.clip(np.diag(s_aa), 0.0, None))
        db = np.sqrt(np.clip(np.diag(s_bb), 0.0, None))
        denom = np.outer(da, db)
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(denom > 0, np.abs(s_ab) / denom, 0.0)
        return float(corr.max(initial=0.0))

    def __call__(self, dataset: Dataset, i, j, cond, cfg: CiConfig) -> TestRecord:
        part = dataset.partition
        key_i, key_j = _as_key(i), _as_key(j)
        stat = self.partial_cross_max(
            part.cols_of(key_i), part.cols_of(key_j), part.cols_of(_as_key(cond))
        )
        p = 1.0 if stat < self.tol else 0.0
        return record(key_i, key_j, cond, p, stat, cfg, ("oracle",))
