"""Weighted decision stumps.

The split search minimises the weighted misclassification error directly.
Candidate thresholds are midpoints between consecutive distinct values of a
feature, plus a ``-inf`` sentinel that sends every sample right (the
constant, majority-class rule). Ties are resolved towards the lower feature
index, then the lower threshold; leaf-majority ties towards the lower class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .data import Dataset


@dataclass(frozen=True)
class Stump:
    feature_index: int
    threshold: float
    left_class: int
    right_class: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Vectorised prediction for an ``(n, d)`` matrix; ``x <= threshold`` goes left."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
        if self.feature_index >= X.shape[1]:
            raise ValueError(
                f"stump uses feature {self.feature_index} but input has {X.shape[1]} columns"
            )
        goes_left = X[:, self.feature_index] <= self.threshold
        return np.where(goes_left, self.left_class, self.right_class).astype(np.int64)

    @property
    def is_constant(self) -> bool:
        return self.left_class == self.right_class


def stump_predict(s: Stump, x, n_features: int | None = None) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("stump_predict takes a single feature vector")
    if n_features is not None and len(x) != n_features:
        raise ValueError(f"expected {n_features} features, got {len(x)}")
    if s.feature_index >= len(x):
        raise ValueError(f"stump uses feature {s.feature_index} but x has {len(x)} entries")
    return s.left_class if x[s.feature_index] <= s.threshold else s.right_class


@numba.njit(cache=True, nogil=True)
def _search(xs, ys, order, w, K):
    d, n = xs.shape
    total = np.zeros(K)
    for i in range(n):
        total[ys[0, i]] += w[order[0, i]]
    wsum = 0.0
    for k in range(K):
        wsum += total[k]

    best_k = 0
    for k in range(1, K):
        if total[k] > total[best_k]:
            best_k = k
    best_err = wsum - total[best_k]
    best_f = 0
    best_t = -np.inf
    best_l = best_k
    best_r = best_k

    left = np.zeros(K)
    for f in range(d):
        left[:] = 0.0
        for j in range(n - 1):
            left[ys[f, j]] += w[order[f, j]]
            a = xs[f, j]
            b = xs[f, j + 1]
            if a < b:
                ml = left[0]
                al = 0
                mr = total[0] - left[0]
                ar = 0
                for k in range(1, K):
                    if left[k] > ml:
                        ml = left[k]
                        al = k
                    rk = total[k] - left[k]
                    if rk > mr:
                        mr = rk
                        ar = k
                err = wsum - ml - mr
                if err < best_err:
                    best_err = err
                    best_f = f
                    t = 0.5 * (a + b)
                    # adjacent floats: the midpoint can round up onto b
                    if not t < b:
                        t = a
                    best_t = t
                    best_l = al
                    best_r = ar
    return best_f, best_t, best_l, best_r


class SortedColumns:
    """Per-feature sort of a design matrix, reusable across weight vectors."""

    def __init__(self, X, y, order=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if order is None:
            order = np.argsort(X, axis=0, kind="stable").T
        self.order = np.ascontiguousarray(order, dtype=np.int32)
        cols = np.arange(X.shape[1])[:, None]
        self.values = np.ascontiguousarray(X.T[cols, self.order])
        self.labels = np.ascontiguousarray(y[self.order], dtype=np.int32)
        self.n_samples = X.shape[0]

    def fit(self, w, K: int) -> Stump:
        w = np.ascontiguousarray(w, dtype=np.float64)
        if len(w) != self.n_samples:
            raise ValueError(f"weight vector has {len(w)} entries for {self.n_samples} samples")
        f, t, left, right = _search(self.values, self.labels, self.order, w, K)
        return Stump(int(f), float(t), int(left), int(right))


def fit_stump_arrays(X, y, w, K: int) -> Stump:
    """One-off fit on raw arrays."""
    return SortedColumns(X, y).fit(w, K)


def fit_stump(ds: Dataset, w) -> Stump:
    """Stump minimising the weighted error of ``ds`` under weights ``w``."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (ds.n_samples,):
        raise ValueError(f"weight vector has shape {w.shape}, expected ({ds.n_samples},)")
    if np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
        raise ValueError("weights must be non-negative and sum to 1")
    return ds.sorted_columns.fit(w, ds.K)


def stump_error(X, y, w, s: Stump) -> float:
    """Unnormalised weighted error ``sum(w[wrong])``."""
    wrong = s.predict(X) != y
    return float(np.sum(w[wrong]))
