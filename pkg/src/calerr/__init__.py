"""Variational estimation of Lp and proper-loss calibration errors.

Estimates how far a probabilistic classifier sits from calibration by
comparing its risk against the best recalibration of its own outputs, fitted
and scored on separate cross-validation folds.  Ships anchored Lp losses with
the one-sided over/under-confidence split, several recalibrators, histogram
and clustering baselines, and synthetic scenarios with a Monte Carlo oracle.
"""

__version__ = "0.1.0"

from .baselines import binned_ece_binary, clustered_ece_multiclass
from .core import (
    CEReport,
    FoldPlan,
    LabeledDataset,
    MetricSpec,
    make_folds,
    subseed,
    top_class_binarize,
    validate_simplex,
)
from .estimator import (
    estimate_ce_cv,
    estimate_ce_insample,
    estimate_over_under,
    per_fold_ce,
)
from .losses import (
    AnchoredLpLoss,
    GeneralDistanceLoss,
    anchored_lp_terms,
    brier_loss,
    general_distance_loss,
    log_loss,
    lp_anchored_loss,
    lp_gradient,
    over_confidence_loss,
    over_under_total_terms,
    under_confidence_loss,
)
from .recalibrate import (
    FunctionRecalibrator,
    IdentityRecalibrator,
    RecalibratorSpec,
    fit_isotonic_binary,
    fit_isotonic_multiclass,
    fit_nadaraya_watson,
    fit_partitionwise,
    fit_recalibrator,
    fit_temperature,
    kmeans,
)
from .synthetic import (
    Scenario,
    apply_gstar,
    make_dataset,
    sample_labels,
    sample_predictions,
    true_ce_monte_carlo,
)

__all__ = [
    "AnchoredLpLoss",
    "CEReport",
    "FoldPlan",
    "FunctionRecalibrator",
    "GeneralDistanceLoss",
    "IdentityRecalibrator",
    "LabeledDataset",
    "MetricSpec",
    "RecalibratorSpec",
    "Scenario",
    "anchored_lp_terms",
    "apply_gstar",
    "binned_ece_binary",
    "brier_loss",
    "clustered_ece_multiclass",
    "estimate_ce_cv",
    "estimate_ce_insample",
    "estimate_over_under",
    "fit_isotonic_binary",
    "fit_isotonic_multiclass",
    "fit_nadaraya_watson",
    "fit_partitionwise",
    "fit_recalibrator",
    "fit_temperature",
    "general_distance_loss",
    "kmeans",
    "log_loss",
    "lp_anchored_loss",
    "lp_gradient",
    "make_dataset",
    "make_folds",
    "over_confidence_loss",
    "over_under_total_terms",
    "per_fold_ce",
    "sample_labels",
    "sample_predictions",
    "subseed",
    "top_class_binarize",
    "true_ce_monte_carlo",
    "under_confidence_loss",
    "validate_simplex",
]
