"""Synthetic benchmark scenarios with known miscalibration maps.

Predictions are drawn from a symmetric Jeffreys-style prior on the simplex
(Beta(1/2, 1/2) for binary, Dirichlet(1/2) otherwise), labels from a known map
g*(u) of the prediction, so the true calibration error E ||U - g*(U)||_p is
available through plain Monte Carlo.  All sampling uses the counter-based
Philox generator, which the emitted dataset headers record.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import LabeledDataset

SCENARIO_KINDS = (
    "calibrated",
    "binary_overconfident",
    "binary_shifted",
    "multiclass_overconfident",
    "multiclass_underconfident",
)

RNG_NAME = "philox"
_LOGIT_CLAMP = 1e-12
_PRED_STREAM = 11
_LABEL_STREAM = 23

_DEFAULT_ALPHA = {"multiclass_overconfident": 0.3, "multiclass_underconfident": 2.0}


@dataclass(frozen=True)
class Scenario:
    """A named prediction-and-label generating process."""

    kind: str
    classes: int = 2
    epsilon: float = 0.02   # shift size for binary_shifted
    alpha: float | None = None  # multiclass log-scaling, defaults 0.3 over / 2.0 under
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.classes < 2:
            raise ValueError("classes must be >= 2")
        if self.kind.startswith("binary") and self.classes != 2:
            raise ValueError(f"{self.kind} is a 2-class scenario, got classes = {self.classes}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must be in [0, 1)")
        if self.alpha is None and self.kind in _DEFAULT_ALPHA:
            object.__setattr__(self, "alpha", _DEFAULT_ALPHA[self.kind])
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _rng(stream: int, seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([stream, seed])))


def sample_predictions(s: Scenario, n: int) -> np.ndarray:
    """(n, classes) simplex rows: normalized Gamma(1/2, 1) draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = _rng(_PRED_STREAM, s.seed).gamma(0.5, 1.0, size=(n, s.classes))
    sums = g.sum(axis=1)
    dead = sums <= 0.0  # astronomically rare underflow of a whole row
    if dead.any():
        g[dead] = 1.0
        sums[dead] = float(s.classes)
    return g / sums[:, None]


def _sigmoid(t):
    return 1.0 / (1.0 + np.exp(-t))


def apply_gstar(s: Scenario, u) -> np.ndarray:
    """True conditional label distribution g*(u) for prediction rows u.

    Accepts one simplex vector or an (n, k) matrix and returns the same shape.
    """
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if s.kind == "calibrated":
        out = U.copy()
    elif s.kind in ("binary_overconfident", "binary_shifted"):
        pos = np.clip(U[:, 0], _LOGIT_CLAMP, 1.0 - _LOGIT_CLAMP)
        if s.kind == "binary_overconfident":
            v = _sigmoid(0.4 * np.log(pos / (1.0 - pos)) + 0.3)
        else:
            v = np.minimum(1.0, U[:, 0] + s.epsilon)
        out = np.stack([v, 1.0 - v], axis=1)
    else:
        W = _sigmoid(s.alpha * np.log(np.maximum(U, _LOGIT_CLAMP)))
        out = W / W.sum(axis=1, keepdims=True)
    return out[0] if single else out


def sample_labels(probs, seed: int) -> np.ndarray:
    """One categorical label per probability row; deterministic in seed."""
    P = np.atleast_2d(np.asarray(probs, dtype=float))
    r = _rng(_LABEL_STREAM, seed).random(P.shape[0])
    cdf = P.cumsum(axis=1)
    labels = (r[:, None] >= cdf).sum(axis=1)
    return np.minimum(labels, P.shape[1] - 1).astype(np.int64)


def make_dataset(s: Scenario, n: int) -> LabeledDataset:
    """Sample predictions and labels for the scenario."""
    U = sample_predictions(s, n)
    return LabeledDataset(U, sample_labels(apply_gstar(s, U), s.seed))


def true_ce_monte_carlo(s: Scenario, p: float, n_samples: int = 300_000,
                        seed: int | None = None):
    """Monte Carlo ground truth (value, stderr) for E ||U - g*(U)||_p.

    The calibrated scenario returns exactly (0.0, 0.0).
    """
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    sc = s if seed is None else replace(s, seed=seed)
    U = sample_predictions(sc, n_samples)
    diffs = np.abs(U - apply_gstar(sc, U))
    vals = diffs.sum(axis=1) if p == 1.0 else ((diffs ** p).sum(axis=1)) ** (1.0 / p)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n_samples))
