"""Imbalance-aware classification metrics.

Confusion matrices are indexed ``m[predicted, actual]``: rows are
predictions, columns are the true classes.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    m: np.ndarray

    @property
    def K(self) -> int:
        return self.m.shape[0]

    @property
    def row_totals(self) -> np.ndarray:
        return self.m.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.m.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.m.sum())


@dataclass(frozen=True)
class ClassStats:
    """Per-class statistics; entries with a zero denominator are 0 and flagged."""

    recall: np.ndarray
    precision: np.ndarray
    f1: np.ndarray
    recall_defined: np.ndarray
    precision_defined: np.ndarray
    f1_defined: np.ndarray


def confusion(actual, predicted, K: int) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if actual.shape != predicted.shape or actual.ndim != 1:
        raise ValueError(
            f"actual and predicted must be 1-D of equal length, got {actual.shape} and {predicted.shape}"
        )
    for name, arr in (("actual", actual), ("predicted", predicted)):
        if arr.size and (arr.min() < 0 or arr.max() >= K):
            raise ValueError(f"{name} labels outside 0..{K - 1}")
    m = np.zeros((K, K), dtype=np.int64)
    np.add.at(m, (predicted, actual), 1)
    return ConfusionMatrix(m)


def _safe_ratio(num, den):
    defined = den > 0
    out = np.zeros(len(num), dtype=np.float64)
    np.divide(num, den, out=out, where=defined)
    return out, defined


def per_class_stats(cm: ConfusionMatrix) -> ClassStats:
    diag = np.diag(cm.m).astype(np.float64)
    recall, r_ok = _safe_ratio(diag, cm.col_totals)
    precision, p_ok = _safe_ratio(diag, cm.row_totals)
    f1_ok = r_ok & p_ok
    f1, _ = _safe_ratio(2.0 * recall * precision, recall + precision)
    f1 = np.where(f1_ok, f1, 0.0)
    return ClassStats(recall, precision, f1, r_ok, p_ok, f1_ok)


def gmean(recalls) -> float:
    """Geometric mean of per-class recalls; exactly 0 when any recall is 0."""
    r = np.asarray(recalls, dtype=np.float64)
    if r.size == 0:
        raise ValueError("gmean of an empty recall vector")
    if np.any(r == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(r))))


def macro_stats(cs: ClassStats) -> tuple[float, float, float]:
    """Macro precision, macro recall, and their harmonic combination."""
    if not (cs.precision_defined.all() and cs.recall_defined.all()):
        warnings.warn("undefined per-class statistics counted as 0 in macro averages")
    mp = float(np.mean(cs.precision))
    mr = float(np.mean(cs.recall))
    mf = 2.0 * mp * mr / (mp + mr) if mp + mr > 0 else 0.0
    return mp, mr, mf


@dataclass(frozen=True)
class Evaluation:
    """Bundle of everything computed from one prediction run."""

    cm: ConfusionMatrix
    stats: ClassStats
    gmean: float
    macro_precision: float
    macro_recall: float
    macro_f1: float


def evaluate(actual, predicted, K: int) -> Evaluation:
    cm = confusion(actual, predicted, K)
    cs = per_class_stats(cm)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mp, mr, mf = macro_stats(cs)
    return Evaluation(cm, cs, gmean(cs.recall), mp, mr, mf)


def _fmt(x: float, defined: bool = True) -> str:
    return f"{x:.6f}" if defined else "undefined"


def class_names(K: int, names=None) -> list[str]:
    if names is not None:
        return list(names)
    return [f"class {k + 1}" for k in range(K)]


def report_csv(ev: Evaluation, names=None) -> str:
    """One row per class plus an aggregate row."""
    labels = class_names(ev.cm.K, names)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "support", "predicted", "recall", "precision", "f1"])
    s = ev.stats
    for k, label in enumerate(labels):
        w.writerow([
            label,
            int(ev.cm.col_totals[k]),
            int(ev.cm.row_totals[k]),
            _fmt(s.recall[k], s.recall_defined[k]),
            _fmt(s.precision[k], s.precision_defined[k]),
            _fmt(s.f1[k], s.f1_defined[k]),
        ])
    w.writerow([
        "macro",
        ev.cm.total,
        ev.cm.total,
        _fmt(ev.macro_recall),
        _fmt(ev.macro_precision),
        _fmt(ev.macro_f1),
    ])
    w.writerow(["gmean", "", "", _fmt(ev.gmean), "", ""])
    return buf.getvalue()


def confusion_csv(cm: ConfusionMatrix, names=None) -> str:
    labels = class_names(cm.K, names)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["predicted\\actual", *labels, "total"])
    for k, label in enumerate(labels):
        w.writerow([label, *(int(v) for v in cm.m[k]), int(cm.row_totals[k])])
    w.writerow(["total", *(int(v) for v in cm.col_totals), cm.total])
    return buf.getvalue()


def report_text(ev: Evaluation, names=None) -> str:
    labels = class_names(ev.cm.K, names)
    width = max(12, *(len(x) for x in labels))
    lines = ["Confusion matrix (rows: predicted, columns: actual)"]
    lines.append(" " * width + "".join(f"{x:>12}" for x in labels) + f"{'total':>12}")
    for k, label in enumerate(labels):
        cells = "".join(f"{int(v):>12}" for v in ev.cm.m[k])
        lines.append(f"{label:<{width}}{cells}{int(ev.cm.row_totals[k]):>12}")
    cells = "".join(f"{int(v):>12}" for v in ev.cm.col_totals)
    lines.append(f"{'total':<{width}}{cells}{ev.cm.total:>12}")
    lines.append("")
    lines.append(f"{'':<{width}}{'recall':>12}{'precision':>12}{'f1':>12}")
    s = ev.stats
    for k, label in enumerate(labels):
        lines.append(
            f"{label:<{width}}"
            f"{_fmt(s.recall[k], s.recall_defined[k]):>12}"
            f"{_fmt(s.precision[k], s.precision_defined[k]):>12}"
            f"{_fmt(s.f1[k], s.f1_defined[k]):>12}"
        )
    lines.append("")
    lines.append(f"G-mean           {ev.gmean:.6f}")
    lines.append(f"Macro precision  {ev.macro_precision:.6f}")
    lines.append(f"Macro recall     {ev.macro_recall:.6f}")
    lines.append(f"Macro F1         {ev.macro_f1:.6f}")
    if not (s.precision_defined.all() and s.recall_defined.all()):
        lines.append("warning: undefined statistics were counted as 0 in macro averages")
    return "\n".join(lines) + "\n"
