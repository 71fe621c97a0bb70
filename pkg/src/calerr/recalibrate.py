"""Recalibration maps from the probability simplex to itself.

These are the hypothesis classes the variational estimator optimizes over:
identity, one-vs-rest isotonic regression (pool-adjacent-violators),
temperature scaling, Nadaraya-Watson kernel smoothing, and partition-wise
averaging over a k-means clustering of the predictions.  Every fitted object
exposes predict((m, k) array) -> (m, k) array of valid simplex rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset
from .losses import PROB_FLOOR

RECALIBRATOR_KINDS = ("identity", "isotonic", "temperature", "nw", "partition")

_RENORM_FLOOR = 1e-12   # one-vs-rest rows whose sum falls below this become uniform
_LOG_T_RANGE = 4.0      # temperature search spans log T in [-4, 4]
_LOG_T_TOL = 1e-6
_NW_CHUNK = 2_000_000   # cap on query x train distance-matrix cells held at once


@dataclass(frozen=True)
class RecalibratorSpec:
    """Which recalibrator to fit, with its knobs.

    n_clusters = None resolves at fit time to 15 for binary data, 30 otherwise.
    """

    kind: str
    bandwidth: float = 0.1
    n_clusters: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in RECALIBRATOR_KINDS:
            raise ValueError(f"unknown recalibrator kind {self.kind!r}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")


class IdentityRecalibrator:
    """Returns predictions unchanged."""

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float)


@dataclass(frozen=True)
class IsotonicStep:
    """Monotone step function from a PAVA fit: breakpoints x, nondecreasing values y."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        idx = np.searchsorted(self.x, q, side="right") - 1
        return self.y[np.clip(idx, 0, len(self.y) - 1)]


def _pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares monotone fit by pool-adjacent-violators; y in x-sorted order."""
    vals: list[float] = []
    wts: list[float] = []
    sizes: list[int] = []
    for yi, wi in zip(y, w):
        cv, cw, cs = float(yi), float(wi), 1
        while vals and vals[-1] > cv:
            cv = (vals[-1] * wts[-1] + cv * cw) / (wts[-1] + cw)
            cw += wts[-1]
            cs += sizes[-1]
            vals.pop(); wts.pop(); sizes.pop()
        vals.append(cv); wts.append(cw); sizes.append(cs)
    return np.repeat(vals, sizes)


def fit_isotonic_binary(xs, ys) -> IsotonicStep:
    """Least-squares nondecreasing step fit of ys on xs; ties in xs are pooled first.

    Prediction for a new x is the value of the step whose interval contains x,
    extended constant beyond the fitted range.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size == 0:
        raise ValueError("xs and ys must be equal-length non-empty 1-d arrays")
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    ux, start = np.unique(xs, return_index=True)
    counts = np.diff(np.append(start, xs.size))
    pooled = np.add.reduceat(ys, start) / counts
    fitted = _pava(pooled, counts.astype(float))
    return IsotonicStep(ux, fitted)


@dataclass(frozen=True)
class IsotonicRecalibrator:
    """One-vs-rest isotonic steps, renormalized across classes at predict time."""

    steps: tuple

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        S = np.column_stack([step(X[:, j]) for j, step in enumerate(self.steps)])
        sums = S.sum(axis=1)
        dead = sums <= _RENORM_FLOOR
        if dead.any():
            S[dead] = 1.0 / S.shape[1]
            sums = S.sum(axis=1)
        return S / sums[:, None]


def fit_isotonic_multiclass(d: LabeledDataset) -> IsotonicRecalibrator:
    """Per-class isotonic fit of the label indicator on that class's probability."""
    steps = tuple(
        fit_isotonic_binary(d.predictions[:, j], (d.labels == j).astype(float))
        for j in range(d.k)
    )
    return IsotonicRecalibrator(steps)


@dataclass(frozen=True)
class TemperatureRecalibrator:
    """Softmax of log-probabilities divided by a fitted temperature."""

    temperature: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        L = np.log(np.maximum(np.asarray(X, dtype=float), PROB_FLOOR)) / self.temperature
        L -= L.max(axis=1, keepdims=True)
        E = np.exp(L)
        return E / E.sum(axis=1, keepdims=True)


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def fit_temperature(d: LabeledDataset) -> TemperatureRecalibrator:
    """Golden-section search for the temperature minimizing mean log loss.

    The search runs over log T in [-4, 4] to absolute tolerance 1e-6; when
    T = 1 is not beaten (for instance all predictions uniform, objective
    constant) it is returned as the tie-break.
    """
    L = np.log(np.maximum(d.predictions, PROB_FLOOR))
    rows = np.arange(d.n)
    y = d.labels

    def nll(log_t: float) -> float:
        S = L / math.exp(log_t)
        S = S - S.max(axis=1, keepdims=True)
        E = np.exp(S)
        picked = E[rows, y] / E.sum(axis=1)
        return float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())

    t = _golden_min(nll, -_LOG_T_RANGE, _LOG_T_RANGE, _LOG_T_TOL)
    if nll(0.0) <= nll(t) + 1e-12:
        return TemperatureRecalibrator(1.0)
    return TemperatureRecalibrator(math.exp(t))


@dataclass(frozen=True)
class NadarayaWatsonRecalibrator:
    """RBF-weighted average of training one-hot labels; exact, no acceleration."""

    train: np.ndarray
    onehot: np.ndarray
    bandwidth: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty((X.shape[0], self.onehot.shape[1]))
        t2 = (self.train ** 2).sum(axis=1)
        step = max(1, _NW_CHUNK // max(1, self.train.shape[0]))
        for lo in range(0, X.shape[0], step):
            Q = X[lo:lo + step]
            d2 = (Q ** 2).sum(axis=1)[:, None] + t2[None, :] - 2.0 * Q @ self.train.T
            np.maximum(d2, 0.0, out=d2)
            # shift by the row minimum so the nearest point never underflows
            w = np.exp(-(d2 - d2.min(axis=1, keepdims=True)) / (2.0 * self.bandwidth ** 2))
            out[lo:lo + step] = (w @ self.onehot) / w.sum(axis=1, keepdims=True)
        return out


def fit_nadaraya_watson(d: LabeledDataset, bandwidth: float = 0.1) -> NadarayaWatsonRecalibrator:
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return NadarayaWatsonRecalibrator(d.predictions.copy(), d.onehot(), float(bandwidth))


def _kmeanspp_init(X: np.ndarray, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    C = np.empty((n_clusters, X.shape[1]))
    C[0] = X[int(rng.integers(n))]
    d2 = ((X - C[0]) ** 2).sum(axis=1)
    for j in range(1, n_clusters):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # every point already sits on a centroid
        else:
            idx = int(rng.choice(n, p=d2 / total))
        C[j] = X[idx]
        d2 = np.minimum(d2, ((X - C[j]) ** 2).sum(axis=1))
    return C


def kmeans(points, n_clusters: int, seed: int, max_iters: int = 100, tol: float = 1e-6,
           inertia_trace: list | None = None):
    """Lloyd's algorithm with k-means++ init; deterministic in seed.

    Runs until the largest centroid movement drops below tol or max_iters.
    Empty clusters are re-seeded to the point currently farthest from its
    assigned centroid, so no returned cluster is empty.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a (n, k) array")
    n = X.shape[0]
    if not 1 <= n_clusters <= n:
        raise ValueError(f"n_clusters must be in [1, {n}], got {n_clusters}")
    rng = np.random.default_rng(seed)
    C = _kmeanspp_init(X, n_clusters, rng)

    def assign_and_repair(C):
        d2 = ((X ** 2).sum(axis=1)[:, None] + (C ** 2).sum(axis=1)[None, :]
              - 2.0 * X @ C.T)
        np.maximum(d2, 0.0, out=d2)
        assign = d2.argmin(axis=1)
        cur = d2[np.arange(n), assign]
        for j in np.flatnonzero(np.bincount(assign, minlength=n_clusters) == 0):
            far = int(cur.argmax())
            C[j] = X[far]
            assign[far] = j
            cur[far] = 0.0
        return assign, cur

    assign = None
    for _ in range(max_iters):
        assign, cur = assign_and_repair(C)
        if inertia_trace is not None:
            inertia_trace.append(float(cur.sum()))
        sums = np.zeros_like(C)
        np.add.at(sums, assign, X)
        counts = np.bincount(assign, minlength=n_clusters).astype(float)
        newC = sums / counts[:, None]
        move = float(np.sqrt(((newC - C) ** 2).sum(axis=1)).max())
        C = newC
        if move < tol:
            break
    assign, _ = assign_and_repair(C)
    return C, assign


@dataclass(frozen=True)
class PartitionRecalibrator:
    """Maps a prediction to the mean one-hot label of its nearest cluster."""

    centroids: np.ndarray
    cluster_means: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        d2 = ((X ** 2).sum(axis=1)[:, None] + (self.centroids ** 2).sum(axis=1)[None, :]
              - 2.0 * X @ self.centroids.T)
        return self.cluster_means[d2.argmin(axis=1)]


def fit_partitionwise(d: LabeledDataset, n_clusters: int, seed: int) -> PartitionRecalibrator:
    """k-means the predictions, then average one-hot labels within each cluster."""
    C, assign = kmeans(d.predictions, n_clusters, seed)
    Y = d.onehot()
    sums = np.zeros((n_clusters, d.k))
    np.add.at(sums, assign, Y)
    counts = np.bincount(assign, minlength=n_clusters).astype(float)
    return PartitionRecalibrator(C, sums / counts[:, None])


class FunctionRecalibrator:
    """Wraps a vectorized callable (m, k) -> (m, k); handy for oracle maps."""

    def __init__(self, fn):
        self.fn = fn

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(X, dtype=float)), dtype=float)


def fit_recalibrator(d: LabeledDataset, spec: RecalibratorSpec):
    """Fit the recalibrator described by spec on the dataset."""
    if spec.kind == "identity":
        return IdentityRecalibrator()
    if spec.kind == "isotonic":
        return fit_isotonic_multiclass(d)
    if spec.kind == "temperature":
        return fit_temperature(d)
    if spec.kind == "nw":
        return fit_nadaraya_watson(d, spec.bandwidth)
    if spec.kind == "partition":
        n_clusters = spec.n_clusters if spec.n_clusters is not None else (15 if d.k == 2 else 30)
        n_clusters = min(n_clusters, d.n)  # tiny folds cannot host more clusters than points
        return fit_partitionwise(d, n_clusters, spec.seed)
    raise ValueError(f"unknown recalibrator kind {spec.kind!r}")
