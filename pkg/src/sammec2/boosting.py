"""Boosting with decision stumps: SAMME, Ada.C2, SAMME.C2 and resampling variants.

All loops share the same skeleton. Weights start uniform; each round fits a
stump on the current distribution, measures the (cost-free) weighted error,
derives the stump's vote weight ``alpha`` and re-weights the samples as

    D[t+1, i]  ~  cost[i] * D[t, i] * exp(-alpha * [sample i correct])

with ``cost = 1`` for the cost-insensitive variants. A round whose alpha is
not positive ends training and is discarded.
"""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .data import DataError, Dataset
from .resampling import (
    DEFAULT_SMOTE_K,
    SmoteSampler,
    oversample_target,
    smote,
    undersample_indices,
    undersample_target,
)
from .stump import Stump, fit_stump_arrays

FORMAT_VERSION = 1
DEFAULT_EPS_CLAMP = 1e-10


class Variant(str, enum.Enum):
    SAMME = "SAMME"
    ADA_C2 = "ADA_C2"
    SAMME_C2 = "SAMME_C2"
    SAMME_SMOTE = "SAMME_SMOTE"
    RUSBOOST = "RUSBOOST"
    SMOTEBOOST = "SMOTEBOOST"

    @property
    def cost_sensitive(self) -> bool:
        return self in (Variant.ADA_C2, Variant.SAMME_C2)


class ModelFormatError(ValueError):
    """Raised when a model file cannot be read back as an ensemble."""


@dataclass(frozen=True)
class CostVector:
    """Per-class misclassification costs, each in ``(0, 1]``."""

    per_class: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(c) for c in self.per_class)
        if not vals:
            raise ValueError("empty cost vector")
        for c in vals:
            if not (0.0 < c <= 1.0):
                raise ValueError(f"costs must lie in (0, 1], got {c}")
        object.__setattr__(self, "per_class", vals)

    def per_sample(self, labels: np.ndarray) -> np.ndarray:
        return np.asarray(self.per_class)[labels]

    def relative(self) -> np.ndarray:
        """Costs divided by their maximum.

        The normalised weight update is invariant to a common cost factor, so
        this changes nothing mathematically; a constant vector becomes all
        ones and the cost multiplication is then exact in floating point.
        """
        c = np.asarray(self.per_class)
        return c / c.max()


@dataclass
class BoostConfig:
    variant: Variant = Variant.SAMME_C2
    T: int = 200
    costs: CostVector | None = None
    smote_k: int = DEFAULT_SMOTE_K
    target_ratio: float = 1.0
    seed: int = 0
    eps_clamp: float = DEFAULT_EPS_CLAMP
    alpha_coef: float = 0.5

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if self.costs is not None and not isinstance(self.costs, CostVector):
            self.costs = CostVector(tuple(self.costs))
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if not 0.0 < self.eps_clamp < 0.5:
            raise ValueError("eps_clamp must be in (0, 0.5)")
        if self.alpha_coef <= 0:
            raise ValueError("alpha_coef must be positive")
        if self.smote_k < 1:
            raise ValueError("smote_k must be positive")
        if self.variant.cost_sensitive and self.costs is None:
            raise ValueError(f"{self.variant.value} requires a cost vector")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "T": self.T,
            "costs": None if self.costs is None else list(self.costs.per_class),
            "smote_k": self.smote_k,
            "target_ratio": self.target_ratio,
            "seed": self.seed,
            "eps_clamp": self.eps_clamp,
            "alpha_coef": self.alpha_coef,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoostConfig":
        return cls(**d)


@dataclass(frozen=True)
class RoundLog:
    round: int
    error: float
    alpha: float


@dataclass
class Ensemble:
    members: list[tuple[Stump, float]]
    K: int
    feature_names: tuple[str, ...]
    variant: Variant
    log: list[RoundLog] = field(default_factory=list)
    weight_sums: list[float] = field(default_factory=list, repr=False)
    stopped_early: bool = False

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def votes(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        if not self.members:
            raise ValueError("ensemble has no members")
        v = np.zeros((X.shape[0], self.K))
        rows = np.arange(X.shape[0])
        for s, a in self.members:
            v[rows, s.predict(X)] += a
        return v

    def predict(self, X) -> np.ndarray:
        # np.argmax returns the first maximum, i.e. the lowest class index
        return np.argmax(self.votes(X), axis=1)

    def predict_proba(self, X) -> np.ndarray:
        v = self.votes(X)
        return v / v.sum(axis=1, keepdims=True)


def alpha(eps: float, K: int, eps_clamp: float = DEFAULT_EPS_CLAMP, coef: float = 0.5) -> float:
    """Stump vote weight ``coef * ln((1 - eps) / eps) + ln(K - 1)``."""
    if K < 2:
        raise ValueError("K must be at least 2")
    e = min(max(eps, eps_clamp), 1.0 - eps_clamp)
    return coef * math.log((1.0 - e) / e) + math.log(K - 1)


def weighted_error(ds: Dataset, w, s: Stump) -> float:
    w = np.asarray(w, dtype=np.float64)
    wrong = s.predict(ds.features) != ds.labels
    return float(np.sum(w[wrong]) / np.sum(w))


def update_weights(w, costs, alpha_t: float, correct) -> np.ndarray:
    """Cost-scaled multiplicative update, normalised to sum 1.

    Correctly classified samples are multiplied by ``exp(-alpha_t)``,
    everything by its cost.
    """
    w = np.asarray(w, dtype=np.float64)
    costs = np.asarray(costs, dtype=np.float64)
    correct = np.asarray(correct, dtype=bool)
    if not (w.shape == costs.shape == correct.shape):
        raise ValueError("weights, costs and correctness flags must have equal length")
    num = costs * w * np.where(correct, math.exp(-alpha_t), 1.0)
    total = num.sum()
    if not total > 0:
        raise ArithmeticError("all updated weights are zero")
    return num / total


def _ada_c2_alpha(w, costs, correct, eps_clamp: float, coef: float) -> float:
    cw = costs * w
    good = float(cw[correct].sum())
    bad = float(cw[~correct].sum())
    # same ratio as good/bad, clamped like eps
    e = bad / (good + bad)
    e = min(max(e, eps_clamp), 1.0 - eps_clamp)
    return coef * math.log((1.0 - e) / e)


def fit(ds: Dataset, cfg: BoostConfig) -> Ensemble:
    """Train an ensemble of at most ``cfg.T`` stumps."""
    variant = cfg.variant
    if ds.n_samples < 1:
        raise DataError("empty dataset")
    if ds.K < 2:
        raise ValueError("boosting needs K >= 2")
    if variant is Variant.ADA_C2 and ds.K != 2:
        raise ValueError(f"ADA_C2 is binary; got K={ds.K}")
    if cfg.costs is not None and len(cfg.costs.per_class) != ds.K:
        raise ValueError(f"cost vector has {len(cfg.costs.per_class)} entries for K={ds.K}")

    if variant is Variant.SAMME_SMOTE:
        ds = smote(ds, cfg.smote_k, seed=_sub_seed(cfg.seed, 0))

    n, K = ds.n_samples, ds.K
    X, y = ds.features, ds.labels
    if variant.cost_sensitive:
        costs = cfg.costs.relative()[y]
    else:
        costs = np.ones(n)

    counts = np.bincount(y, minlength=K)
    sampler = SmoteSampler(ds, cfg.smote_k) if variant is Variant.SMOTEBOOST else None
    rus_target = undersample_target(counts, cfg.target_ratio) if variant is Variant.RUSBOOST else None

    w = np.full(n, 1.0 / n)
    ens = Ensemble([], K, ds.feature_names, variant)
    for t in range(cfg.T):
        if variant is Variant.RUSBOOST:
            rng = np.random.default_rng(_sub_seed(cfg.seed, t + 1))
            idx = undersample_indices(y, K, rus_target, rng)
            ws = w[idx]
            stump = fit_stump_arrays(X[idx], y[idx], ws / ws.sum(), K)
        elif variant is Variant.SMOTEBOOST:
            stump = _smoteboost_stump(ds, w, counts, sampler, _sub_seed(cfg.seed, t + 1))
        else:
            stump = ds.sorted_columns.fit(w, K)

        correct = stump.predict(X) == y
        eps = float(w[~correct].sum() / w.sum())
        if variant is Variant.ADA_C2:
            a = _ada_c2_alpha(w, costs, correct, cfg.eps_clamp, cfg.alpha_coef)
        else:
            a = alpha(eps, K, cfg.eps_clamp, cfg.alpha_coef)
        if not a > 0:
            ens.stopped_early = True
            break
        ens.members.append((stump, a))
        ens.log.append(RoundLog(t + 1, eps, a))
        w = update_weights(w, costs, a, correct)
        ens.weight_sums.append(float(w.sum()))
    return ens


def _smoteboost_stump(ds: Dataset, w, counts, sampler: SmoteSampler, seed: int) -> Stump:
    target = oversample_target(counts)
    X_new, y_new, _ = sampler.synthesize(target, np.random.default_rng(seed))
    w_new = np.zeros(len(y_new))
    for c in np.unique(y_new):
        w_new[y_new == c] = w[ds.labels == c].mean()
    X_all = np.vstack([ds.features, X_new])
    y_all = np.concatenate([ds.labels, y_new])
    w_all = np.concatenate([w, w_new])
    return fit_stump_arrays(X_all, y_all, w_all / w_all.sum(), ds.K)


def _sub_seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def predict(e: Ensemble, x) -> int:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("predict takes a single feature vector; use Ensemble.predict for matrices")
    return int(e.predict(x[None, :])[0])


def predict_proba(e: Ensemble, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("predict_proba takes a single feature vector")
    return e.predict_proba(x[None, :])[0]


def feature_importance(e: Ensemble) -> np.ndarray:
    """Alpha mass per feature, normalised to sum 1.

    Constant stumps split nothing and are skipped.
    """
    if not e.members:
        raise ValueError("ensemble has no members")
    imp = np.zeros(e.n_features)
    for s, a in e.members:
        if not s.is_constant:
            imp[s.feature_index] += a
    total = imp.sum()
    return imp / total if total > 0 else imp


# ---------------------------------------------------------------- persistence

def _encode_float(x: float):
    return x if math.isfinite(x) else repr(x)


def _decode_float(x) -> float:
    if isinstance(x, bool):
        raise TypeError("boolean where a number was expected")
    if isinstance(x, str):
        if x not in ("inf", "-inf"):
            raise ValueError(f"bad number {x!r}")
        return float(x)
    return float(x)


def to_dict(e: Ensemble) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "variant": e.variant.value,
        "K": e.K,
        "feature_names": list(e.feature_names),
        "members": [
            {
                "feature_index": s.feature_index,
                "threshold": _encode_float(s.threshold),
                "left_class": s.left_class,
                "right_class": s.right_class,
                "alpha": a,
            }
            for s, a in e.members
        ],
        "training_log": [[r.round, r.error, r.alpha] for r in e.log],
    }


def from_dict(d: dict) -> Ensemble:
    if not isinstance(d, dict) or "format_version" not in d:
        raise ModelFormatError("model file lacks a format_version")
    if d["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format_version {d['format_version']!r} (expected {FORMAT_VERSION})"
        )
    try:
        K = int(d["K"])
        names = tuple(str(s) for s in d["feature_names"])
        variant = Variant(d["variant"])
        members = []
        for m in d["members"]:
            s = Stump(
                int(m["feature_index"]),
                _decode_float(m["threshold"]),
                int(m["left_class"]),
                int(m["right_class"]),
            )
            a = _decode_float(m["alpha"])
            if not (0 <= s.feature_index < len(names)):
                raise ValueError(f"feature_index {s.feature_index} out of range")
            if not (0 <= s.left_class < K and 0 <= s.right_class < K):
                raise ValueError("leaf class out of range")
            if not a > 0:
                raise ValueError(f"non-positive alpha {a}")
            members.append((s, a))
        log = [RoundLog(int(r), float(e), float(a)) for r, e, a in d.get("training_log", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model schema violation: {exc}") from exc
    if K < 2 or not members:
        raise ModelFormatError("model needs K >= 2 and at least one member")
    return Ensemble(members, K, names, variant, log)


def save_model(e: Ensemble, path) -> None:
    text = json.dumps(to_dict(e), indent=1)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_model(path) -> Ensemble:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a valid model file ({exc})") from exc
    return from_dict(d)
