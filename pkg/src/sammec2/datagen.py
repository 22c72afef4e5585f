"""Synthetic imbalanced multi-class data.

Each class owns ``clusters_per_class`` Gaussian clusters (identity
covariance) centred on distinct vertices of a hypercube of half-side
``class_sep`` in the informative subspace. Remaining columns are pure
standard-normal noise.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .data import DataError, Dataset

# Class proportions of the simulation benchmark and of the telematics portfolio.
SIMULATION_WEIGHTS = (0.96, 0.035, 0.005)
TELEMATICS_WEIGHTS = (0.971, 0.028, 0.001)


@dataclass(frozen=True)
class GenConfig:
    n_samples: int = 100_000
    n_features: int = 50
    n_informative: int = 10
    n_classes: int = 3
    clusters_per_class: int = 2
    class_sep: float = 2.0
    weights: tuple[float, ...] = field(default=SIMULATION_WEIGHTS)
    label_noise: float = 0.0
    seed: int = 16

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.n_samples < 1 or self.n_features < 1 or self.n_informative < 1:
            raise ValueError("n_samples, n_features and n_informative must be positive")
        if self.n_informative > self.n_features:
            raise ValueError("n_informative cannot exceed n_features")
        if self.n_classes < 2:
            raise ValueError("n_classes must be at least 2")
        if self.clusters_per_class < 1:
            raise ValueError("clusters_per_class must be positive")
        if self.class_sep <= 0:
            raise ValueError("class_sep must be positive")
        if len(self.weights) != self.n_classes:
            raise ValueError(f"need {self.n_classes} weights, got {len(self.weights)}")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")
        if not 0.0 <= self.label_noise < 1.0:
            raise ValueError("label_noise must be in [0, 1)")
        n_centers = self.n_classes * self.clusters_per_class
        if self.n_informative < 63 and 2**self.n_informative < n_centers:
            raise ValueError(
                f"{n_centers} cluster centres do not fit on a {self.n_informative}-d hypercube"
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        return d


def apportion(n: int, weights) -> np.ndarray:
    """Largest-remainder apportionment of ``n`` items; ties go to the lower index."""
    quotas = n * np.asarray(weights, dtype=np.float64)
    counts = np.floor(quotas).astype(np.int64)
    remainder = n - int(counts.sum())
    order = np.lexsort((np.arange(len(quotas)), -(quotas - counts)))
    counts[order[:remainder]] += 1
    return counts


def cluster_centers(cfg: GenConfig, rng: np.random.Generator) -> np.ndarray:
    """Distinct hypercube vertices, shape ``(K * clusters_per_class, n_informative)``."""
    n_centers = cfg.n_classes * cfg.clusters_per_class
    dim = cfg.n_informative
    if dim <= 30:
        codes = rng.choice(2**dim, size=n_centers, replace=False)
        bits = (codes[:, None] >> np.arange(dim)) & 1
    else:
        seen, rows = set(), []
        while len(rows) < n_centers:
            b = rng.integers(0, 2, size=dim)
            key = b.tobytes()
            if key not in seen:
                seen.add(key)
                rows.append(b)
        bits = np.array(rows)
    return (2.0 * bits - 1.0) * cfg.class_sep


def generate(cfg: GenConfig) -> Dataset:
    counts = apportion(cfg.n_samples, cfg.weights)
    starved = [k for k, (w, c) in enumerate(zip(cfg.weights, counts)) if w > 0 and c == 0]
    if starved:
        raise DataError(
            f"n_samples={cfg.n_samples} leaves classes {starved} with no samples"
        )
    rng = np.random.default_rng(cfg.seed)
    centers = cluster_centers(cfg, rng)

    y = np.repeat(np.arange(cfg.n_classes), counts)
    cluster = y * cfg.clusters_per_class + rng.integers(
        0, cfg.clusters_per_class, size=cfg.n_samples
    )
    X = rng.standard_normal((cfg.n_samples, cfg.n_features))
    X[:, : cfg.n_informative] += centers[cluster]

    perm = rng.permutation(cfg.n_samples)
    X, y = X[perm], y[perm]

    if cfg.label_noise > 0:
        # separate stream: features do not depend on the noise level
        noise_rng = np.random.default_rng([cfg.seed, 1])
        flip = noise_rng.random(cfg.n_samples) < cfg.label_noise
        y[flip] = noise_rng.integers(0, cfg.n_classes, size=int(flip.sum()))

    names = [f"x{j}" for j in range(cfg.n_features)]
    return Dataset(X, y, cfg.n_classes, names)
