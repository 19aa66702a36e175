"""Sample matrices with a block partition into vector variables.

CSV layout: one column per micro component with header ``name:component``
(e.g. ``X1:0,X1:1,X2:0``); consecutive columns sharing a name form one
vector variable.  An optional ``@lag`` suffix on the name round-trips
lag-expanded datasets (``X1@1:0``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graphs import Partition


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    partition: Partition
    names: tuple[str, ...] = ()
    lags: tuple[int, ...] | None = None  # per macro variable, 0 = present

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        object.__setattr__(self, "X", X)
        if X.ndim != 2:
            raise ValueError("X must be 2-D (samples x micro columns)")
        if X.shape[1] != self.partition.n_micro:
            raise ValueError("column count must match partition")
        if not self.names:
            object.__setattr__(
                self, "names", tuple(f"X{i+1}" for i in range(self.partition.n_macro))
            )
        if len(self.names) != self.partition.n_macro:
            raise ValueError("one name per macro variable required")
        if self.lags is not None and len(self.lags) != self.partition.n_macro:
            raise ValueError("one lag per macro variable required")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_vars(self) -> int:
        return self.partition.n_macro

    @property
    def widths(self) -> tuple[int, ...]:
        return self.partition.macro_sizes

    def block(self, i: int) -> np.ndarray:
        return self.X[:, self.partition.block_cols(i)]

    def cols_of(self, macro_set) -> np.ndarray:
        return self.X[:, self.partition.cols_of(macro_set)]

    def as_micro(self) -> "Dataset":
        """View every micro column as its own (univariate) variable."""
        n = self.partition.n_micro
        names = []
        for i in range(self.n_vars):
            base = self.names[i]
            for c in range(self.widths[i]):
                names.append(f"{base}.{c}")
        return Dataset(self.X, Partition.from_sizes([1] * n), tuple(names))


def _header_fields(ds: Dataset) -> list[str]:
    fields = []
    for i in range(ds.n_vars):
        name = ds.names[i]
        if ds.lags is not None and ds.lags[i] != 0:
            name = f"{name}@{ds.lags[i]}"
        for c in range(ds.widths[i]):
            fields.append(f"{name}:{c}")
    return fields


def save_csv(ds: Dataset, path: str | Path) -> None:
    header = ",".join(_header_fields(ds))
    np.savetxt(path, ds.X, delimiter=",", header=header, comments="", fmt="%.17g")


def load_csv(path: str | Path) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip()
    if not header:
        raise ValueError(f"empty dataset file: {path}")
    names: list[str] = []
    lags: list[int] = []
    sizes: list[int] = []
    for fielditem in header.split(","):
        name, _, comp = fielditem.rpartition(":")
        if not name:
            raise ValueError(f"bad column header {fielditem!r}; expected name:component")
        base, _, lag = name.partition("@")
        lag_val = int(lag) if lag else 0
        if names and names[-1] == base and lags[-1] == lag_val:
            sizes[-1] += 1
        else:
            names.append(base)
            lags.append(lag_val)
            sizes.append(1)
    X = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    lags_t = tuple(lags) if any(lags) else None
    return Dataset(X, Partition.from_sizes(sizes), tuple(names), lags_t)
