"""Benchmark harness: train each variant on one split and write comparison reports.

Every random stream is derived from a single master seed, and the run
manifest records the resolved configuration. Replaying a manifest
reproduces every CSV byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import platform
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .boosting import BoostConfig, CostVector, Variant, feature_importance, fit, save_model
from .costsearch import GAConfig, ga_search
from .data import DEFAULT_LABEL_COLUMN, Dataset, class_distribution, load_csv, stratified_split
from .datagen import GenConfig, generate
from .metrics import class_names, confusion_csv, evaluate, gmean, report_csv, report_text

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
COMPARISON_VARIANTS = ("SAMME", "SAMME_SMOTE", "RUSBOOST", "SMOTEBOOST", "SAMME_C2")
CLAIM_NAMES = ("Claim 0", "Claim 1", "Claim 2+")


def derive_seed(master: int, label: str) -> int:
    """Deterministic 32-bit seed for a named stream."""
    return int(np.random.SeedSequence([master, zlib.crc32(label.encode())]).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    out_dir: str
    variants: list[str] = field(default_factory=lambda: list(COMPARISON_VARIANTS))
    gen: GenConfig | None = None
    data_path: str | None = None
    label_column: str = DEFAULT_LABEL_COLUMN
    n_classes: int = 3
    class_names: list[str] | None = None
    train_fraction: float = 0.75
    seed: int = 16
    T: int = 200
    costs: list[float] | None = None
    ga: bool = False
    ga_config: GAConfig = field(default_factory=GAConfig)
    smote_k: int = 5
    target_ratio: float = 1.0
    eps_clamp: float = 1e-10
    alpha_coef: float = 0.5
    write_models: bool = True

    def __post_init__(self):
        if not self.variants:
            raise ValueError("at least one variant is required")
        self.variants = [Variant(v).value for v in self.variants]
        if (self.gen is None) == (self.data_path is None):
            raise ValueError("give exactly one data source: a generator config or a CSV path")
        if isinstance(self.gen, dict):
            self.gen = GenConfig(**self.gen)
        if isinstance(self.ga_config, dict):
            self.ga_config = GAConfig(**self.ga_config)
        needs_costs = {"SAMME_C2", "ADA_C2"} & set(self.variants)
        if needs_costs and not self.ga and self.costs is None:
            raise ValueError(f"{sorted(needs_costs)} need --costs or the GA search")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gen"] = None if self.gen is None else self.gen.to_dict()
        d["ga_config"] = self.ga_config.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)


def _boost_config(cfg: ExperimentConfig, variant: str, costs) -> BoostConfig:
    return BoostConfig(
        variant=variant,
        T=cfg.T,
        costs=None if costs is None else CostVector(tuple(costs)),
        smote_k=cfg.smote_k,
        target_ratio=cfg.target_ratio,
        seed=derive_seed(cfg.seed, f"variant:{variant}"),
        eps_clamp=cfg.eps_clamp,
        alpha_coef=cfg.alpha_coef,
    )


def load_experiment_data(cfg: ExperimentConfig) -> tuple[Dataset, dict]:
    if cfg.gen is not None:
        ds = generate(cfg.gen)
        info = {"source": "generated", "generator": cfg.gen.to_dict()}
    else:
        ds = load_csv(cfg.data_path, cfg.label_column, cfg.n_classes)
        digest = hashlib.sha256(Path(cfg.data_path).read_bytes()).hexdigest()
        info = {"source": "csv", "path": str(cfg.data_path), "sha256": digest}
    info["n_samples"] = ds.n_samples
    info["n_features"] = ds.n_features
    info["class_counts"] = class_distribution(ds).counts.tolist()
    return ds, info


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")


def importance_csv(names, imp) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "feature", "importance"])
    order = sorted(range(len(names)), key=lambda j: (-imp[j], j))
    for rank, j in enumerate(order, start=1):
        w.writerow([rank, names[j], _fmt(imp[j])])
    return buf.getvalue()


def predictions_csv(actual, predicted, proba, names) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "actual", "predicted", *(f"p[{n}]" for n in names)])
    for i, (a, p, row) in enumerate(zip(actual, predicted, proba)):
        w.writerow([i, names[a], names[p], *(_fmt(v) for v in row)])
    return buf.getvalue()


def comparison_csv(results: dict, names) -> str:
    """Per-class recall for each variant, then the G-mean row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    variants = list(results)
    w.writerow(["class", *variants])
    for k, name in enumerate(names):
        row = [name]
        for v in variants:
            ev = results[v]
            row.append("failed" if ev is None else _fmt(ev.stats.recall[k]))
        w.writerow(row)
    w.writerow(["G-mean", *("failed" if results[v] is None else _fmt(results[v].gmean) for v in variants)])
    return buf.getvalue()


def run_benchmark(cfg: ExperimentConfig) -> dict:
    """Train, evaluate and report every variant; returns the manifest dict."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds, data_info = load_experiment_data(cfg)
    names = class_names(ds.K, cfg.class_names)
    split_seed = derive_seed(cfg.seed, "split")
    train, test = stratified_split(ds, cfg.train_fraction, split_seed)

    resolved: dict = {"split_seed": split_seed, "train_counts": class_distribution(train).counts.tolist(),
                      "test_counts": class_distribution(test).counts.tolist()}
    costs = cfg.costs
    if cfg.ga and {"SAMME_C2", "ADA_C2"} & set(cfg.variants):
        ga_cfg = GAConfig(**{**cfg.ga_config.to_dict(), "seed": derive_seed(cfg.seed, "ga")})
        log.info("GA cost search: %s", ga_cfg)
        ga = ga_search(train, ga_cfg)
        costs = [float(c) for c in ga.best_costs]
        resolved["ga"] = {"seed": ga_cfg.seed, "best_costs": costs, "best_fitness": ga.best_fitness}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["generation", "best_fitness", "mean_fitness"])
        for g, (b, m) in enumerate(zip(ga.history, ga.mean_history)):
            w.writerow([g, _fmt(b), _fmt(m)])
        _write(out / "ga_history.csv", buf.getvalue())
    resolved["costs"] = costs

    results, status = {}, {}
    for variant in cfg.variants:
        v_costs = costs if Variant(variant).cost_sensitive else None
        bcfg = _boost_config(cfg, variant, v_costs)
        try:
            ens = fit(train, bcfg)
            if not ens.members:
                raise RuntimeError("no weak learner better than chance; ensemble is empty")
            pred = ens.predict(test.features)
            proba = ens.predict_proba(test.features)
        except Exception as exc:  # a failing variant must not abort the others
            log.warning("variant %s failed: %s", variant, exc)
            results[variant] = None
            status[variant] = {"status": "failed", "error": f"{type(exc).__name__}: {exc}",
                               "boost_config": bcfg.to_dict()}
            continue
        ev = evaluate(test.labels, pred, ds.K)
        results[variant] = ev
        tag = variant.lower()
        _write(out / f"metrics_{tag}.csv", report_csv(ev, names))
        _write(out / f"confusion_{tag}.csv", confusion_csv(ev.cm, names))
        _write(out / f"importance_{tag}.csv", importance_csv(ds.feature_names, feature_importance(ens)))
        _write(out / f"predictions_{tag}.csv", predictions_csv(test.labels, pred, proba, names))
        if cfg.write_models:
            save_model(ens, out / f"model_{tag}.json")
        status[variant] = {
            "status": "ok",
            "members": len(ens.members),
            "stopped_early": ens.stopped_early,
            "boost_config": bcfg.to_dict(),
        }

    _write(out / "comparison.csv", comparison_csv(results, names))
    _check_comparison(results)

    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "config": cfg.to_dict(),
        "data": data_info,
        "resolved": resolved,
        "variants": status,
        "software": {
            "sammec2": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    _write(out / "summary.txt", _summary(cfg, results, status, names, resolved))
    return manifest


def _check_comparison(results: dict) -> None:
    for v, ev in results.items():
        if ev is not None and abs(gmean(ev.stats.recall) - ev.gmean) > 1e-12:
            raise AssertionError(f"G-mean of {v} inconsistent with its recalls")


def _summary(cfg, results, status, names, resolved) -> str:
    lines = [f"sammec2 {__version__} benchmark", ""]
    if resolved.get("costs") is not None:
        lines.append("costs: " + ", ".join(f"{c:.6f}" for c in resolved["costs"]))
    lines.append(f"rounds T={cfg.T}, smote k={cfg.smote_k}, undersampling ratio={cfg.target_ratio}")
    lines.append("")
    lines.append(comparison_csv(results, names).replace(",", "\t"))
    for v, ev in results.items():
        lines.append(f"== {v} ==")
        if ev is None:
            lines.append("FAILED: " + status[v]["error"])
        else:
            lines.append(report_text(ev, names))
    return "\n".join(lines) + "\n"


def load_manifest(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if d.get("manifest_version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {d.get('manifest_version')!r}")
    return ExperimentConfig.from_dict(d["config"])
