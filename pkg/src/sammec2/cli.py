"""Command-line interface.

Every subcommand accepts ``--config FILE`` with ``key=value`` lines; keys
are flag names without the leading dashes. Flags given on the command line
win over the file. ``--seed`` defaults to ``$RNG_SEED`` when set.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .benchmark import CLAIM_NAMES, COMPARISON_VARIANTS, ExperimentConfig, load_manifest, run_benchmark
from .boosting import BoostConfig, Variant, fit, load_model, save_model
from .costsearch import GAConfig, ga_search
from .data import DEFAULT_LABEL_COLUMN, DataError, load_csv
from .datagen import SIMULATION_WEIGHTS, TELEMATICS_WEIGHTS, GenConfig, generate
from .metrics import confusion_csv, evaluate, report_csv, report_text

PRESETS = {"simulation": SIMULATION_WEIGHTS, "telematics": TELEMATICS_WEIGHTS}


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _default_seed() -> int:
    env = os.environ.get("RNG_SEED")
    return int(env) if env not in (None, "") else 16


def read_config_file(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None, help="master seed (default: $RNG_SEED or 16)")


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="input CSV")
    p.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    p.add_argument("--n-classes", type=int, default=3)


def _add_gen(p):
    p.add_argument("--preset", choices=sorted(PRESETS), default=None,
                   help="class weights preset (simulation: 96/3.5/0.5, telematics: 97.1/2.8/0.1)")
    p.add_argument("--n-samples", type=int, default=100_000)
    p.add_argument("--n-features", type=int, default=50)
    p.add_argument("--n-informative", type=int, default=10)
    p.add_argument("--n-classes", type=int, default=3)
    p.add_argument("--clusters-per-class", type=int, default=2)
    p.add_argument("--class-sep", type=float, default=2.0)
    p.add_argument("--weights", type=_floats, default=None)
    p.add_argument("--label-noise", type=float, default=0.0)


def _add_boost(p):
    p.add_argument("--rounds", type=int, default=200, help="boosting rounds T")
    p.add_argument("--costs", type=_floats, default=None, help="per-class costs in (0,1]")
    p.add_argument("--smote-k", type=int, default=5)
    p.add_argument("--target-ratio", type=float, default=1.0,
                   help="undersampling target as a multiple of the smallest class")
    p.add_argument("--eps-clamp", type=float, default=1e-10)
    p.add_argument("--alpha-coef", type=float, default=0.5)


def _add_ga(p):
    g = p.add_argument_group("genetic search")
    g.add_argument("--population", type=int, default=20)
    g.add_argument("--generations", type=int, default=30)
    g.add_argument("--tournament-size", type=int, default=3)
    g.add_argument("--mutation-sigma", type=float, default=0.1)
    g.add_argument("--elitism", type=int, default=2)
    g.add_argument("--fitness-rounds", type=int, default=50)
    g.add_argument("--validation-fraction", type=float, default=0.2)
    g.add_argument("--jobs", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sammec2", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic imbalanced dataset as CSV")
    p.add_argument("--config")
    _add_gen(p)
    _add_seed(p)
    p.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train one boosting variant and save the model")
    p.add_argument("--config")
    _add_data(p)
    p.add_argument("--variant", type=Variant, default=Variant.SAMME_C2,
                   help="|".join(v.value for v in Variant))
    _add_boost(p)
    _add_seed(p)
    p.add_argument("--model", required=True, help="output model file")

    p = sub.add_parser("evaluate", help="score a saved model on a labelled CSV")
    p.add_argument("--config")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    p.add_argument("--class-names", type=_names, default=None)
    p.add_argument("--out-dir", default=None, help="also write metrics.csv and confusion.csv here")

    p = sub.add_parser("predict", help="predict classes and probabilities for a CSV")
    p.add_argument("--config")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--ignore-columns", type=_names, default=[DEFAULT_LABEL_COLUMN],
                   help="input columns to drop before matching features")

    p = sub.add_parser("ga-search", help="genetic search for SAMME.C2 per-class costs")
    p.add_argument("--config")
    _add_data(p)
    _add_ga(p)
    _add_seed(p)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("benchmark", help="compare variants on one train/test split")
    p.add_argument("--config")
    p.add_argument("--manifest", help="replay a previous run's manifest.json")
    p.add_argument("--data", default=None, help="CSV source; omit to use the generator")
    p.add_argument("--label-column", default=DEFAULT_LABEL_COLUMN)
    _add_gen(p)
    p.add_argument("--variants", type=_names, default=list(COMPARISON_VARIANTS))
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--class-names", type=_names, default=None)
    _add_boost(p)
    p.add_argument("--ga", action="store_true", help="search SAMME.C2 costs with the GA")
    _add_ga(p)
    _add_seed(p)
    p.add_argument("--no-models", action="store_true", help="skip writing model files")
    p.add_argument("--out-dir", required=True)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config_file(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        unknown = sorted(set(values) - set(known))
        if unknown:
            parser.error(f"unknown keys in {args.config}: {unknown}")
        defaults = {}
        for key, value in values.items():
            action = known[key]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = value  # string defaults are run through type=
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    if hasattr(args, "seed") and args.seed is None:
        args.seed = _default_seed()
    return args


def _gen_config(args, seed: int) -> GenConfig:
    weights = args.weights
    if weights is None:
        weights = PRESETS[args.preset or "simulation"]
    elif args.preset is not None:
        raise ValueError("give either --preset or --weights, not both")
    return GenConfig(
        n_samples=args.n_samples,
        n_features=args.n_features,
        n_informative=args.n_informative,
        n_classes=args.n_classes,
        clusters_per_class=args.clusters_per_class,
        class_sep=args.class_sep,
        weights=tuple(weights),
        label_noise=args.label_noise,
        seed=seed,
    )


def _ga_config(args, seed: int) -> GAConfig:
    return GAConfig(
        population_size=args.population,
        generations=args.generations,
        tournament_size=args.tournament_size,
        mutation_sigma=args.mutation_sigma,
        elitism_count=args.elitism,
        fitness_rounds=args.fitness_rounds,
        validation_fraction=args.validation_fraction,
        seed=seed,
        n_jobs=args.jobs,
    )


def cmd_generate(args) -> None:
    ds = generate(_gen_config(args, args.seed))
    ds.to_csv(args.out, args.label_column)
    counts = np.bincount(ds.labels, minlength=ds.K)
    print(f"wrote {ds.n_samples} rows x {ds.n_features} features to {args.out}; class counts {counts.tolist()}")


def cmd_train(args) -> None:
    ds = load_csv(args.data, args.label_column, args.n_classes)
    cfg = BoostConfig(
        variant=args.variant,
        T=args.rounds,
        costs=args.costs,
        smote_k=args.smote_k,
        target_ratio=args.target_ratio,
        seed=args.seed,
        eps_clamp=args.eps_clamp,
        alpha_coef=args.alpha_coef,
    )
    ens = fit(ds, cfg)
    if not ens.members:
        raise RuntimeError("no weak learner better than chance; nothing to save")
    save_model(ens, args.model)
    note = " (stopped early)" if ens.stopped_early else ""
    print(f"trained {cfg.variant.value} with {len(ens.members)} stumps{note}; saved to {args.model}")


def cmd_evaluate(args) -> None:
    ens = load_model(args.model)
    X, labels, _ = _read_matching(args.data, ens.feature_names, ignore=(), label_column=args.label_column)
    if labels is None:
        raise DataError(f"{args.data}: label column {args.label_column!r} missing")
    ev = evaluate(labels, ens.predict(X) if len(X) else np.empty(0, np.int64), ens.K)
    sys.stdout.write(report_text(ev, args.class_names))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.csv").write_text(report_csv(ev, args.class_names), encoding="utf-8")
        (out / "confusion.csv").write_text(confusion_csv(ev.cm, args.class_names), encoding="utf-8")


def _read_matching(path, feature_names, ignore, label_column=None):
    """Read a CSV whose columns are matched to ``feature_names`` by name."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, header row expected") from None
        skip = set(ignore) | ({label_column} if label_column else set())
        present = [h for h in header if h not in skip]
        missing = [f for f in feature_names if f not in header]
        extra = [h for h in present if h not in feature_names]
        if missing or extra:
            raise DataError(f"{path}: schema mismatch; missing columns {missing}, extra columns {extra}")
        pos = [header.index(f) for f in feature_names]
        lab = header.index(label_column) if label_column in header else None
        rows, labels = [], []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(row[i]) for i in pos])
                if lab is not None:
                    labels.append(int(float(row[lab])))
            except (ValueError, IndexError):
                raise DataError(f"{path}: row {rowno} has a missing or non-numeric value") from None
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_names))
    if not np.all(np.isfinite(X)):
        raise DataError(f"{path}: non-finite feature values")
    return X, (np.array(labels, dtype=np.int64) if lab is not None else None), header


def cmd_predict(args) -> None:
    ens = load_model(args.model)
    X, _, _ = _read_matching(args.input, ens.feature_names, ignore=args.ignore_columns)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["predicted", *(f"p_{k}" for k in range(ens.K))])
        if len(X):
            pred = ens.predict(X)
            proba = ens.predict_proba(X)
            for c, row in zip(pred, proba):
                w.writerow([int(c), *(repr(float(p)) for p in row)])
    print(f"wrote {len(X)} predictions to {args.output}")


def cmd_ga_search(args) -> None:
    ds = load_csv(args.data, args.label_column, args.n_classes)
    res = ga_search(ds, _ga_config(args, args.seed))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "best_costs.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class", "cost"])
        for k, c in enumerate(res.best_costs):
            w.writerow([k, repr(float(c))])
    with open(out / "ga_history.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "best_fitness", "mean_fitness"])
        for g, (b, m) in enumerate(zip(res.history, res.mean_history)):
            w.writerow([g, repr(b), repr(m)])
    costs = ",".join(repr(float(c)) for c in res.best_costs)
    print(f"best costs {costs} (validation G-mean {res.best_fitness:.6f})")


def cmd_benchmark(args) -> None:
    if args.manifest:
        cfg = load_manifest(args.manifest)
        cfg.out_dir = args.out_dir
    else:
        gen = None if args.data else _gen_config(args, args.seed)
        names = args.class_names
        if names is None and args.n_classes == 3:
            names = list(CLAIM_NAMES)
        cfg = ExperimentConfig(
            out_dir=args.out_dir,
            variants=args.variants,
            gen=gen,
            data_path=args.data,
            label_column=args.label_column,
            n_classes=args.n_classes,
            class_names=names,
            train_fraction=args.train_fraction,
            seed=args.seed,
            T=args.rounds,
            costs=args.costs,
            ga=args.ga,
            ga_config=_ga_config(args, args.seed),
            smote_k=args.smote_k,
            target_ratio=args.target_ratio,
            eps_clamp=args.eps_clamp,
            alpha_coef=args.alpha_coef,
            write_models=not args.no_models,
        )
    manifest = run_benchmark(cfg)
    sys.stdout.write(Path(cfg.out_dir, "comparison.csv").read_text(encoding="utf-8"))
    failed = [v for v, s in manifest["variants"].items() if s["status"] != "ok"]
    if failed:
        print(f"failed variants: {', '.join(failed)}", file=sys.stderr)


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "ga-search": cmd_ga_search,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
