"""Shared domain types: simplex validation, labeled datasets, fold plans, metrics and reports."""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

SUM_TOL = 1e-6        # how far a probability row's sum may drift from 1 and still be repaired
ENTRY_TOL = 1e-9      # hard floor for negative entries
_EXACT_SUM = 1e-12    # sums closer than this are treated as exactly 1, keeps repair idempotent

LP_KINDS = ("lp", "lp_power_p")
BINARY_ONLY_KINDS = ("over_confidence", "under_confidence")
TOPCLASS_KINDS = ("topclass_l1", "topclass_over", "topclass_under")
METRIC_KINDS = LP_KINDS + ("brier", "logloss") + BINARY_ONLY_KINDS + TOPCLASS_KINDS


def validate_simplex(v, tol: float = SUM_TOL) -> np.ndarray:
    """Check that v lies on the probability simplex, repairing float-level noise.

    Entries below -1e-9, non-finite values, or a sum further than ``tol`` from 1
    are rejected.  A sum that deviates by at most ``tol`` is fixed by
    renormalization; exact inputs come back unchanged.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"simplex vector needs at least 2 entries, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("simplex vector has non-finite entries")
    if np.any(v < -ENTRY_TOL):
        raise ValueError(f"negative probability {v.min():.6g}")
    s = float(v.sum())
    if abs(s - 1.0) > tol:
        raise ValueError(f"probabilities sum to {s:.8g}, off from 1 by more than {tol:g}")
    w = np.clip(v, 0.0, None)
    if abs(s - 1.0) > _EXACT_SUM:
        w = w / w.sum()
    return np.clip(w, 0.0, 1.0)


def validate_rows(P, tol: float = SUM_TOL) -> np.ndarray:
    """Vectorized simplex validation for a (n, k) matrix; errors name the offending row."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] < 2:
        raise ValueError(f"expected a (n, k>=2) probability matrix, got shape {P.shape}")
    finite = np.isfinite(P).all(axis=1)
    if not finite.all():
        raise ValueError(f"row {int(np.flatnonzero(~finite)[0])}: non-finite probability")
    neg = (P < -ENTRY_TOL).any(axis=1)
    if neg.any():
        i = int(np.flatnonzero(neg)[0])
        raise ValueError(f"row {i}: negative probability {P[i].min():.6g}")
    sums = P.sum(axis=1)
    bad = np.abs(sums - 1.0) > tol
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"row {i}: probabilities sum to {sums[i]:.8g}")
    P = np.clip(P, 0.0, None)
    need = np.abs(sums - 1.0) > _EXACT_SUM
    if need.any():
        P[need] = P[need] / P[need].sum(axis=1, keepdims=True)
    return np.clip(P, 0.0, 1.0)


@dataclass(frozen=True)
class LabeledDataset:
    """n prediction rows on the probability simplex plus integer class labels."""

    predictions: np.ndarray  # (n, k) float64
    labels: np.ndarray       # (n,) integers in [0, k)

    def __post_init__(self):
        P = validate_rows(self.predictions)
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != P.shape[0]:
            raise ValueError(f"labels shape {y.shape} does not match {P.shape[0]} rows")
        if not np.issubdtype(y.dtype, np.integer):
            raise ValueError("labels must be integers")
        y = y.astype(np.int64)
        if y.size and (y.min() < 0 or y.max() >= P.shape[1]):
            i = int(np.flatnonzero((y < 0) | (y >= P.shape[1]))[0])
            raise ValueError(f"row {i}: label {y[i]} outside [0, {P.shape[1] - 1}]")
        P.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "predictions", P)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.predictions.shape[0]

    @property
    def k(self) -> int:
        return self.predictions.shape[1]

    def onehot(self) -> np.ndarray:
        return np.eye(self.k)[self.labels]

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.predictions[idx], self.labels[idx])


@dataclass(frozen=True)
class FoldPlan:
    """A random partition of range(n) into folds of near-equal size."""

    assignments: np.ndarray  # (n,) fold id per sample
    k_folds: int
    seed: int

    def indices(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == j)

    def complement(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != j)


def make_folds(n: int, k_folds: int, seed: int, labels=None, stratified: bool = False) -> FoldPlan:
    """Uniformly shuffled partition into k_folds folds with sizes differing by at most 1.

    Deterministic in (n, k_folds, seed).  With ``stratified=True`` the shuffle
    happens within each label class, so every class spreads evenly over folds.
    """
    if k_folds < 2:
        raise ValueError(f"need at least 2 folds, got {k_folds}")
    if k_folds > n:
        raise ValueError(f"cannot split {n} samples into {k_folds} folds")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    rng = np.random.default_rng(seed)
    if stratified:
        if labels is None:
            raise ValueError("stratified folds need labels")
        labels = np.asarray(labels)
        order = np.concatenate(
            [rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)]
        )
    else:
        order = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    assignments[order] = np.arange(n) % k_folds
    return FoldPlan(assignments, k_folds, seed)


def top_class_binarize(d: LabeledDataset) -> LabeledDataset:
    """Reduce a multiclass dataset to the top-class binary problem.

    Each row becomes (max prob, 1 - max prob); the new label is 0 exactly when
    the original label hits the argmax (ties resolved to the lowest class index).
    """
    m = d.predictions.max(axis=1)
    top = d.predictions.argmax(axis=1)
    preds = np.column_stack([m, 1.0 - m])
    labels = np.where(d.labels == top, 0, 1)
    return LabeledDataset(preds, labels)


@dataclass(frozen=True)
class MetricSpec:
    """Which calibration error to estimate: an Lp distance or a proper-loss divergence."""

    kind: str
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.p < 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def name(self) -> str:
        if self.kind == "lp":
            if self.p == 1.0:
                return "l1"
            if self.p == 2.0:
                return "l2"
            return f"lp:{self.p:g}"
        if self.kind == "lp_power_p":
            return f"lpp:{self.p:g}"
        return {
            "brier": "brier",
            "logloss": "logloss",
            "over_confidence": "over",
            "under_confidence": "under",
            "topclass_l1": "topclass-l1",
            "topclass_over": "topclass-over",
            "topclass_under": "topclass-under",
        }[self.kind]


# metrics built on the anchored L1 base in the binary representation; their
# vector value is exactly twice the scalar |f - C| convention
_L1_FAMILY = ("lp", "topclass_l1") + BINARY_ONLY_KINDS + ("topclass_over", "topclass_under")


@dataclass(frozen=True)
class CEReport:
    """Result of one calibration-error estimate, with per-fold provenance."""

    metric: MetricSpec
    estimate: float
    estimate_clipped: float
    per_fold: tuple          # ((size, value), ...) in fold-index order
    stderr: float
    n: int
    k: int
    k_folds: int
    seed: int

    def to_dict(self) -> dict:
        """Stable-order dict for JSON emission."""
        out = {
            "metric": self.metric.name,
            "p": float(self.metric.p),
            "estimate": self.estimate,
            "estimate_clipped": self.estimate_clipped,
        }
        if self.k == 2 and self.metric.p == 1.0 and self.metric.kind in _L1_FAMILY:
            # vector L1 on 2-vectors double-counts the scalar binary gap
            out["l1_vector"] = self.estimate
            out["l1_binary"] = self.estimate / 2.0
        out["per_fold"] = [{"size": int(s), "value": v} for s, v in self.per_fold]
        out["stderr"] = self.stderr
        out["n"] = self.n
        out["k"] = self.k
        out["folds"] = self.k_folds
        out["seed"] = self.seed
        return out


def subseed(*parts) -> int:
    """Derive a reproducible child seed from integer parts."""
    for q in parts:
        if q < 0:
            raise ValueError("seed parts must be non-negative")
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])
