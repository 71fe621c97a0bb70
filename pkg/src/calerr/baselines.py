"""Histogram and clustering baselines for calibration error."""

from __future__ import annotations

import numpy as np

from .core import LabeledDataset
from .recalibrate import kmeans


def binned_ece_binary(d: LabeledDataset, n_bins: int = 15, scheme: str = "equal_width") -> float:
    """Expected calibration error of the positive class over n_bins bins.

    equal_width uses bins [j/B, (j+1)/B) with the last bin closed; equal_count
    cuts at quantiles, keeping tied values together.  Empty bins contribute 0.
    The value is in the scalar binary convention |accuracy - confidence|.
    """
    if d.k != 2:
        raise ValueError(f"binned ECE needs binary data, got k = {d.k}")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    p = d.predictions[:, 0]
    y = (d.labels == 0).astype(float)
    order = np.lexsort((y, p))  # canonical accumulation order: exact row-order invariance
    p, y = p[order], y[order]
    if scheme == "equal_width":
        idx = np.minimum((p * n_bins).astype(int), n_bins - 1)
    elif scheme == "equal_count":
        edges = np.quantile(p, np.linspace(0.0, 1.0, n_bins + 1)[1:-1])
        idx = np.searchsorted(edges, p, side="right")
    else:
        raise ValueError(f"unknown binning scheme {scheme!r}")
    counts = np.bincount(idx, minlength=n_bins).astype(float)
    acc = np.bincount(idx, weights=y, minlength=n_bins)
    conf = np.bincount(idx, weights=p, minlength=n_bins)
    filled = counts > 0
    gaps = np.abs(acc[filled] - conf[filled]) / counts[filled]
    return float((counts[filled] / d.n) @ gaps)


def clustered_ece_multiclass(d: LabeledDataset, n_clusters: int = 30, seed: int = 0) -> float:
    """Binning ECE for the full simplex: k-means cells instead of interval bins.

    Sums (cell size / n) * ||mean one-hot label - mean prediction||_2 over the
    cells of a k-means clustering of the prediction vectors.  Points are
    clustered in lexicographic order so the value depends only on the multiset
    of rows, not their order in the dataset.
    """
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    n_clusters = min(n_clusters, d.n)
    # canonical (row, label) order: the value depends only on the sample multiset
    order = np.lexsort((d.labels,) + tuple(d.predictions.T[::-1]))
    P = d.predictions[order]
    Y = d.onehot()[order]
    _, assign = kmeans(P, n_clusters, seed)
    counts = np.bincount(assign, minlength=n_clusters).astype(float)
    filled = counts > 0
    acc = np.zeros((n_clusters, d.k))
    conf = np.zeros((n_clusters, d.k))
    np.add.at(acc, assign, Y)
    np.add.at(conf, assign, P)
    gaps = np.sqrt((((acc[filled] - conf[filled]) / counts[filled, None]) ** 2).sum(axis=1))
    return float((counts[filled] / d.n) @ gaps)
