"""SMOTE oversampling and random undersampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataError, Dataset

DEFAULT_SMOTE_K = 5


def oversample_target(counts) -> np.ndarray:
    """Raise every non-empty class to the majority count."""
    counts = np.asarray(counts, dtype=np.int64)
    return np.where(counts > 0, counts.max(), 0)


def undersample_target(counts, ratio: float = 1.0) -> np.ndarray:
    """Cut every class to ``ratio`` times the smallest non-empty class count."""
    counts = np.asarray(counts, dtype=np.int64)
    if ratio <= 0:
        raise ValueError("target ratio must be positive")
    smallest = counts[counts > 0].min()
    want = max(int(np.floor(smallest * ratio + 0.5)), 1)
    return np.minimum(counts, want)


@dataclass(frozen=True)
class SmoteProvenance:
    """Origin of each synthetic row: ``base + gap * (neighbor - base)``.

    ``base`` and ``neighbor`` index rows of the input dataset.
    """

    base: np.ndarray
    neighbor: np.ndarray
    gap: np.ndarray


def _check_target(target, K: int) -> np.ndarray:
    target = np.asarray(target, dtype=np.int64)
    if target.shape != (K,):
        raise ValueError(f"target must have {K} entries, got {target.shape}")
    if np.any(target < 0):
        raise ValueError("targets must be non-negative")
    return target


def nearest_neighbors(points: np.ndarray, k: int, chunk: int = 1024) -> np.ndarray:
    """Indices of the ``k`` nearest other points (Euclidean), ties by lower index."""
    n = len(points)
    sq = np.einsum("ij,ij->i", points, points)
    out = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = points[start:stop]
        dist = sq[start:stop, None] - 2.0 * block @ points.T + sq[None, :]
        np.maximum(dist, 0.0, out=dist)
        rows = np.arange(stop - start)
        dist[rows, rows + start] = np.inf
        if n - 1 > 4 * k:
            kth = np.partition(dist, k - 1, axis=1)[:, k - 1 : k]
            for r in range(stop - start):
                cand = np.flatnonzero(dist[r] <= kth[r])
                out[start + r] = cand[np.argsort(dist[r, cand], kind="stable")[:k]]
        else:
            out[start:stop] = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return out


class SmoteSampler:
    """SMOTE for a fixed dataset; neighbour tables are computed once per class.

    Reusing one sampler across boosting rounds avoids recomputing distances.
    """

    def __init__(self, ds: Dataset, k: int = DEFAULT_SMOTE_K):
        if k < 1:
            raise ValueError("k must be positive")
        self.ds = ds
        self.k = k
        self._members = [np.flatnonzero(ds.labels == c) for c in range(ds.K)]
        self._neighbors: dict[int, np.ndarray] = {}

    def neighbors(self, c: int) -> np.ndarray:
        if c not in self._neighbors:
            members = self._members[c]
            kk = min(self.k, len(members) - 1)
            local = nearest_neighbors(self.ds.features[members], kk)
            self._neighbors[c] = members[local]
        return self._neighbors[c]

    def synthesize(self, target, rng: np.random.Generator):
        """Synthetic rows needed to reach ``target``.

        Returns ``(X_new, y_new, provenance)``; originals are not included.
        """
        ds = self.ds
        target = _check_target(target, ds.K)
        bases, nbrs, gaps, labels = [], [], [], []
        for c in range(ds.K):
            members = self._members[c]
            need = int(target[c]) - len(members)
            if need <= 0:
                continue
            if len(members) < 2:
                raise DataError(
                    f"class {c} has {len(members)} member(s); SMOTE needs at least 2"
                )
            table = self.neighbors(c)
            pick = rng.integers(0, len(members), size=need)
            col = rng.integers(0, table.shape[1], size=need)
            gap = rng.random(need)
            bases.append(members[pick])
            nbrs.append(table[pick, col])
            gaps.append(gap)
            labels.append(np.full(need, c, dtype=np.int64))
        if not bases:
            empty = np.empty(0, dtype=np.int64)
            prov = SmoteProvenance(empty, empty, np.empty(0))
            return np.empty((0, ds.n_features)), empty, prov
        base = np.concatenate(bases)
        nb = np.concatenate(nbrs)
        gap = np.concatenate(gaps)
        X = ds.features
        X_new = X[base] + gap[:, None] * (X[nb] - X[base])
        return X_new, np.concatenate(labels), SmoteProvenance(base, nb, gap)


def smote(ds: Dataset, k: int = DEFAULT_SMOTE_K, target=None, seed: int = 0,
          return_provenance: bool = False):
    """Oversample classes up to ``target`` with SMOTE interpolation.

    Original rows come first, unchanged, followed by synthetic rows grouped
    by class. ``target`` defaults to the majority count for every class.
    Classes already at or above their target are left as they are.
    """
    counts = np.bincount(ds.labels, minlength=ds.K)
    target = oversample_target(counts) if target is None else _check_target(target, ds.K)
    if np.any(target < counts):
        bad = int(np.flatnonzero(target < counts)[0])
        raise ValueError(f"oversampling target {target[bad]} below class {bad} count {counts[bad]}")
    X_new, y_new, prov = SmoteSampler(ds, k).synthesize(target, np.random.default_rng(seed))
    out = Dataset(
        np.vstack([ds.features, X_new]),
        np.concatenate([ds.labels, y_new]),
        ds.K,
        ds.feature_names,
    )
    return (out, prov) if return_provenance else out


def undersample_indices(labels: np.ndarray, K: int, target, rng: np.random.Generator) -> np.ndarray:
    target = _check_target(target, K)
    parts = []
    for c in range(K):
        members = np.flatnonzero(labels == c)
        if target[c] > len(members):
            raise ValueError(
                f"undersampling target {target[c]} exceeds class {c} count {len(members)}"
            )
        parts.append(rng.choice(members, size=int(target[c]), replace=False))
    return np.sort(np.concatenate(parts))


def random_undersample(ds: Dataset, target=None, seed: int = 0) -> Dataset:
    """Keep ``target[c]`` rows of each class, drawn uniformly without replacement."""
    counts = np.bincount(ds.labels, minlength=ds.K)
    target = undersample_target(counts) if target is None else target
    idx = undersample_indices(ds.labels, ds.K, target, np.random.default_rng(seed))
    return ds.subset(idx)
