"""Dataset container, CSV ingestion and stratified splitting."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

DEFAULT_LABEL_COLUMN = "ACC_FREQ"


class DataError(ValueError):
    """Raised when input data violates the dataset contract."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable feature matrix with 0-based integer class labels.

    Attributes:
        features: ``(N, d)`` float array.
        labels: length-``N`` int array with values in ``{0, ..., K-1}``.
        K: number of classes.
        feature_names: length-``d`` tuple of unique column names.
    """

    features: np.ndarray
    labels: np.ndarray
    K: int
    feature_names: tuple[str, ...]

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64, order="C")
        y = np.array(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 1 or d < 1:
            raise DataError(f"dataset needs N >= 1 and d >= 1, got N={n}, d={d}")
        if y.shape != (n,):
            raise DataError(f"labels must have shape ({n},), got {y.shape}")
        if self.K < 1:
            raise DataError(f"K must be positive, got {self.K}")
        if y.min() < 0 or y.max() >= self.K:
            bad = int(np.flatnonzero((y < 0) | (y >= self.K))[0])
            raise DataError(f"label {y[bad]} at index {bad} outside 0..{self.K - 1}")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain missing or non-finite values")
        names = tuple(str(s) for s in self.feature_names)
        if len(names) != d:
            raise DataError(f"expected {d} feature names, got {len(names)}")
        if len(set(names)) != d:
            raise DataError("duplicate feature names")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @cached_property
    def sorted_columns(self):
        """Per-feature sort used by the stump search; built once per dataset."""
        from .stump import SortedColumns

        return SortedColumns(self.features, self.labels)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.K, self.feature_names)

    def to_csv(self, path, label_column: str = DEFAULT_LABEL_COLUMN) -> None:
        if label_column in self.feature_names:
            raise DataError(f"label column {label_column!r} clashes with a feature name")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*self.feature_names, label_column])
            for row, label in zip(self.features, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])


@dataclass(frozen=True)
class ClassDistribution:
    counts: np.ndarray
    proportions: np.ndarray


def class_distribution(ds: Dataset) -> ClassDistribution:
    counts = np.bincount(ds.labels, minlength=ds.K)
    return ClassDistribution(counts=counts, proportions=counts / ds.n_samples)


def load_csv(path, label_column: str = DEFAULT_LABEL_COLUMN, K: int = 3) -> Dataset:
    """Read a headered CSV; every non-label column must be numeric.

    Rows with blank cells are rejected rather than imputed. Row numbers in
    error messages count the header as row 1.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, header row expected") from None
        dupes = sorted({h for h in header if header.count(h) > 1})
        if dupes:
            raise DataError(f"{path}: duplicate header names {dupes}")
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_pos = header.index(label_column)
        feature_pos = [i for i in range(len(header)) if i != label_pos]
        names = [header[i] for i in feature_pos]

        rows, labels = [], []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {rowno} has {len(row)} fields, expected {len(header)}"
                )
            values = []
            for i in feature_pos:
                values.append(_parse_float(row[i], path, rowno, header[i]))
            labels.append(_parse_label(row[label_pos], path, rowno, label_column, K))
            rows.append(values)

    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels), K, names)


def _parse_float(cell: str, path, rowno: int, column: str) -> float:
    text = cell.strip()
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"{path}: row {rowno}, column {column!r}: cannot parse {cell!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"{path}: row {rowno}, column {column!r}: non-finite value {cell!r}")
    return value


def _parse_label(cell: str, path, rowno: int, column: str, K: int) -> int:
    text = cell.strip()
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"{path}: row {rowno}, column {column!r}: cannot parse label {cell!r}"
        ) from None
    if not value.is_integer():
        raise DataError(f"{path}: row {rowno}, column {column!r}: label {cell!r} is not an integer")
    if not 0 <= value < K:
        raise DataError(
            f"{path}: row {rowno}, column {column!r}: label {int(value)} outside 0..{K - 1}"
        )
    return int(value)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split each class separately into train/test parts.

    Per class, ``round_half_up(train_fraction * count)`` rows go to train;
    classes with at least two members keep one row on each side. A singleton
    class goes to train and a warning is issued. Both parts keep the parent's
    row order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    train_idx, test_idx = _split_indices(ds.labels, ds.K, train_fraction, seed)
    if len(test_idx) == 0:
        raise DataError("split leaves the test part empty")
    return ds.subset(train_idx), ds.subset(test_idx)


def _split_indices(labels: np.ndarray, K: int, train_fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for k in range(K):
        members = np.flatnonzero(labels == k)
        count = len(members)
        if count == 0:
            continue
        if count == 1:
            warnings.warn(f"class {k} has a single member; assigned to the training part")
            train_parts.append(members)
            continue
        n_train = min(max(round_half_up(train_fraction * count), 1), count - 1)
        perm = rng.permutation(members)
        train_parts.append(perm[:n_train])
        test_parts.append(perm[n_train:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts)) if test_parts else np.empty(0, np.int64)
    return train_idx, test_idx
