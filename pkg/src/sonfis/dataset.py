"""Numeric dataset handling: CSV ingestion, min-max normalization, splits,
and the synthetic surrogate generator that stands in for unavailable field
data.

A Dataset keeps condition attributes in `X` (n x d) and the decision
attribute in `y` (n,). Values are plain float64; normalization is min-max
to [0, 1] with the affine parameters kept so predictions can be mapped
back to original units.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    inputs: tuple[float, ...]
    output: float


@dataclass(frozen=True)
class SplitSpec:
    n_train: int
    n_test: int
    shuffle_seed: int | None = None

    def __post_init__(self):
        if self.n_train < 1 or self.n_test < 1:
            raise DatasetError("n_train and n_test must both be >= 1")


@dataclass
class Dataset:
    X: np.ndarray  # (n, d) condition attributes
    y: np.ndarray  # (n,) decision attribute
    attribute_names: list[str] = field(default_factory=list)  # inputs then decision
    norm_params: list[tuple[float, float]] | None = None  # per attribute (min, max)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.ndim != 1 or len(self.X) != len(self.y):
            raise DatasetError("X must be (n, d) and y (n,) with matching n")
        if not self.attribute_names:
            self.attribute_names = [f"x{i + 1}" for i in range(self.X.shape[1])] + ["y"]
        if len(self.attribute_names) != self.X.shape[1] + 1:
            raise DatasetError("attribute_names must cover all inputs plus the decision")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise DatasetError("dataset contains non-finite values")

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_inputs(self) -> int:
        return self.X.shape[1]

    @property
    def input_names(self) -> list[str]:
        return self.attribute_names[:-1]

    @property
    def decision_name(self) -> str:
        return self.attribute_names[-1]

    @property
    def records(self) -> list[Record]:
        return [Record(tuple(row), float(t)) for row, t in zip(self.X, self.y)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.attribute_names)
            for row, t in zip(self.X, self.y):
                w.writerow([repr(float(v)) for v in row] + [repr(float(t))])


def load_csv(path, decision_column: str) -> Dataset:
    """Read a comma-separated file (one header row) into a Dataset.

    Inputs are all non-decision columns in header order; row order is
    preserved. Non-numeric or non-finite cells are reported with their
    row number (1-based, excluding the header) and column name.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DatasetError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if decision_column not in header:
            raise DatasetError(f"unknown decision column {decision_column!r}; headers: {header}")
        dec_idx = header.index(decision_column)
        rows = []
        for r, cells in enumerate(reader, start=1):
            if len(cells) != len(header):
                raise DatasetError(f"row {r}: expected {len(header)} cells, got {len(cells)}")
            vals = []
            for name, cell in zip(header, cells):
                try:
                    v = float(cell)
                except ValueError:
                    raise DatasetError(f"row {r}, column {name!r}: non-numeric cell {cell!r}") from None
                if not math.isfinite(v):
                    raise DatasetError(f"row {r}, column {name!r}: non-finite value {cell!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=np.float64)
    input_idx = [i for i in range(len(header)) if i != dec_idx]
    names = [header[i] for i in input_idx] + [header[dec_idx]]
    return Dataset(arr[:, input_idx], arr[:, dec_idx], names)


def min_max_normalize(ds: Dataset) -> Dataset:
    """Affinely map every attribute (inputs and decision) to [0, 1]."""
    cols = [ds.X[:, j] for j in range(ds.n_inputs)] + [ds.y]
    params = []
    normed = []
    for name, col in zip(ds.attribute_names, cols):
        lo, hi = float(col.min()), float(col.max())
        if hi <= lo:
            raise DatasetError(f"constant attribute {name!r} (min == max == {lo})")
        params.append((lo, hi))
        normed.append((col - lo) / (hi - lo))
    X = np.column_stack(normed[:-1])
    return Dataset(X, normed[-1], list(ds.attribute_names), params)


def denormalize_decision(ds: Dataset, values: np.ndarray) -> np.ndarray:
    """Map normalized decision values back to original units."""
    if ds.norm_params is None:
        return np.asarray(values, dtype=np.float64)
    lo, hi = ds.norm_params[-1]
    return np.asarray(values, dtype=np.float64) * (hi - lo) + lo


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint train/test split; contiguous without a seed, otherwise a
    deterministic seeded permutation."""
    n = len(ds)
    if spec.n_train + spec.n_test > n:
        raise DatasetError(f"split {spec.n_train}+{spec.n_test} exceeds dataset size {n}")
    if spec.shuffle_seed is None:
        idx = np.arange(n)
    else:
        idx = np.random.default_rng(spec.shuffle_seed).permutation(n)
    tr = idx[: spec.n_train]
    te = idx[spec.n_train : spec.n_train + spec.n_test]
    names = list(ds.attribute_names)
    np_ = list(ds.norm_params) if ds.norm_params is not None else None
    return (
        Dataset(ds.X[tr], ds.y[tr], names, np_),
        Dataset(ds.X[te], ds.y[te], names, list(np_) if np_ is not None else None),
    )


def gen_synthetic(n: int, noise_sd: float, seed: int) -> Dataset:
    """Synthetic 3-input benchmark: x ~ U[0,1]^3,
    y = 0.5*sin(2*pi*x1)*x2 + x3^2 + N(0, noise_sd^2)."""
    if n < 1:
        raise DatasetError("n must be >= 1")
    if noise_sd < 0:
        raise DatasetError("noise_sd must be >= 0")
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 3))
    y = 0.5 * np.sin(2.0 * np.pi * X[:, 0]) * X[:, 1] + X[:, 2] ** 2
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, size=n)
    return Dataset(X, y, ["x1", "x2", "x3", "y"])
