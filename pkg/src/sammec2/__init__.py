"""Cost-sensitive multi-class boosting (SAMME.C2) and imbalance-aware baselines."""

__version__ = "0.1.0"

from .boosting import (
    BoostConfig,
    CostVector,
    Ensemble,
    Variant,
    feature_importance,
    fit,
    load_model,
    save_model,
)
from .data import Dataset, class_distribution, load_csv, stratified_split
from .datagen import GenConfig, generate
from .metrics import confusion, evaluate, gmean, macro_stats, per_class_stats

__all__ = [
    "BoostConfig",
    "CostVector",
    "Dataset",
    "Ensemble",
    "GenConfig",
    "Variant",
    "class_distribution",
    "confusion",
    "evaluate",
    "feature_importance",
    "fit",
    "generate",
    "gmean",
    "load_csv",
    "load_model",
    "macro_stats",
    "per_class_stats",
    "save_model",
    "stratified_split",
]
