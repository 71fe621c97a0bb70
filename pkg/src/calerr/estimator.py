"""Cross-validated variational estimation of calibration errors.

The estimate of a calibration error CE_d(f) = E d(f(X), E[Y | f(X)]) is the
plug-in risk gap (1/n) sum of loss(f(X_i), Y_i) - loss(g(f(X_i)), Y_i), where g
is a recalibration map fitted on held-out folds.  Because the fitted g can only
approach the true conditional expectation, the expected estimate sits at or
below the true calibration error for any recalibrator fitted on independent
data; richer recalibrators tighten the bound.
"""

from __future__ import annotations

import numpy as np

from .core import (
    BINARY_ONLY_KINDS,
    CEReport,
    LabeledDataset,
    MetricSpec,
    TOPCLASS_KINDS,
    make_folds,
    top_class_binarize,
)
from .losses import (
    anchored_lp_terms,
    brier_terms,
    log_loss_terms,
    over_under_total_terms,
    power_distance_terms,
)
from .recalibrate import RecalibratorSpec, fit_recalibrator

_TOPCLASS_BASE = {
    "topclass_l1": "lp",
    "topclass_over": "over_confidence",
    "topclass_under": "under_confidence",
}


def _plugin_terms(metric: MetricSpec, F: np.ndarray, G: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-sample loss(f, y) - loss(g(f), y); anchored losses vanish at f itself."""
    if metric.kind == "lp":
        return -anchored_lp_terms(G, F, labels, metric.p)
    if metric.kind == "lp_power_p":
        return -power_distance_terms(G, F, labels, metric.p)
    if metric.kind == "brier":
        return brier_terms(F, labels) - brier_terms(G, labels)
    if metric.kind == "logloss":
        return log_loss_terms(F, labels) - log_loss_terms(G, labels)
    if metric.kind in BINARY_ONLY_KINDS:
        over, under, _ = over_under_total_terms(G[:, 0], F[:, 0], labels, metric.p)
        return -(over if metric.kind == "over_confidence" else under)
    raise ValueError(f"no per-sample terms for metric kind {metric.kind!r}")


def per_fold_ce(train: LabeledDataset, val: LabeledDataset, metric: MetricSpec, recalibrator):
    """Fit on train, score on val; returns (fold estimate, per-sample terms).

    ``recalibrator`` is either a RecalibratorSpec to fit or an already fitted
    object with a predict method (an oracle map, a shared fit).  Top-class
    metric kinds binarize both folds before fitting.
    """
    if metric.kind in TOPCLASS_KINDS:
        train = top_class_binarize(train)
        val = top_class_binarize(val)
        metric = MetricSpec(_TOPCLASS_BASE[metric.kind], metric.p)
    if metric.kind in BINARY_ONLY_KINDS and val.k != 2:
        raise ValueError(
            f"{metric.kind} needs binary data; use topclass_over/topclass_under for k = {val.k}"
        )
    g = recalibrator if hasattr(recalibrator, "predict") else fit_recalibrator(train, recalibrator)
    G = np.asarray(g.predict(val.predictions), dtype=float)
    terms = _plugin_terms(metric, val.predictions, G, val.labels)
    return float(terms.mean()), terms


def _check_combo(d: LabeledDataset, metric: MetricSpec):
    if metric.kind in BINARY_ONLY_KINDS and d.k != 2:
        raise ValueError(
            f"{metric.kind} needs binary data; use topclass_over/topclass_under for k = {d.k}"
        )


def _finish(metric, folds, all_terms, n, k, k_folds, seed) -> CEReport:
    estimate = 0.0
    for size, value in folds:  # fold-index order, weighted by fold size
        estimate += (size / n) * value
    terms = np.concatenate(all_terms)
    stderr = float(terms.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return CEReport(
        metric=metric,
        estimate=estimate,
        estimate_clipped=max(estimate, 0.0),
        per_fold=tuple(folds),
        stderr=stderr,
        n=n,
        k=k,
        k_folds=k_folds,
        seed=seed,
    )


def estimate_ce_cv(d: LabeledDataset, metric: MetricSpec, spec: RecalibratorSpec,
                   k_folds: int = 5, seed: int = 0, stratified: bool = False) -> CEReport:
    """Cross-validated calibration-error estimate.

    Each fold is scored by a recalibrator fitted on the other folds; the fold
    values are combined weighted by fold size.  Deterministic in seed.
    """
    _check_combo(d, metric)
    if d.n < 2 * k_folds:
        raise ValueError(f"need at least {2 * k_folds} samples for {k_folds} folds, got {d.n}")
    plan = make_folds(d.n, k_folds, seed, labels=d.labels, stratified=stratified)
    folds = []
    all_terms = []
    for j in range(k_folds):
        train = d.subset(plan.complement(j))
        val = d.subset(plan.indices(j))
        value, terms = per_fold_ce(train, val, metric, spec)
        folds.append((val.n, value))
        all_terms.append(terms)
    return _finish(metric, folds, all_terms, d.n, d.k, k_folds, seed)


def estimate_ce_insample(d: LabeledDataset, metric: MetricSpec, spec: RecalibratorSpec) -> CEReport:
    """Fit and score on the same data: an optimistic (upward-biased) estimate."""
    _check_combo(d, metric)
    value, terms = per_fold_ce(d, d, metric, spec)
    return _finish(metric, [(d.n, value)], [terms], d.n, d.k, 1, spec.seed)


def estimate_over_under(d: LabeledDataset, spec: RecalibratorSpec, k_folds: int = 5,
                        seed: int = 0, p: float = 1.0):
    """Split the Lp calibration error into over- and under-confidence parts.

    Returns (over, under, total) reports computed from identical folds and one
    recalibrator fit per fold, so over + under matches total to float addition
    error.  Multiclass input is reduced to the top-class binary problem first.
    """
    if d.k != 2:
        d = top_class_binarize(d)
    if d.n < 2 * k_folds:
        raise ValueError(f"need at least {2 * k_folds} samples for {k_folds} folds, got {d.n}")
    plan = make_folds(d.n, k_folds, seed)
    folds = {"over": [], "under": [], "total": []}
    terms_acc = {"over": [], "under": [], "total": []}
    for j in range(k_folds):
        train = d.subset(plan.complement(j))
        val = d.subset(plan.indices(j))
        g = fit_recalibrator(train, spec)
        G = np.asarray(g.predict(val.predictions), dtype=float)
        over, under, total = over_under_total_terms(G[:, 0], val.predictions[:, 0], val.labels, p)
        for name, loss_terms in (("over", over), ("under", under), ("total", total)):
            terms = -loss_terms
            folds[name].append((val.n, float(terms.mean())))
            terms_acc[name].append(terms)
    metrics = {
        "over": MetricSpec("over_confidence", p),
        "under": MetricSpec("under_confidence", p),
        "total": MetricSpec("lp", p),
    }
    return tuple(
        _finish(metrics[name], folds[name], terms_acc[name], d.n, d.k, k_folds, seed)
        for name in ("over", "under", "total")
    )
