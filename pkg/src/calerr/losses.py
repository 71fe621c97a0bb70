"""Pointwise losses that are proper for calibration estimation.

The central object is the anchored Lp loss: for an anchor a it scores a
candidate z against a label y as  <grad_z ||z - a||_p, a - e_y>.  It is zero at
z = a, its expectation under y ~ q equals -||q - a||_p, and q minimizes that
expectation, so the induced divergence recovers the Lp calibration gap.
Also here: Brier, log loss, general convex-distance losses, and the one-sided
over/under-confidence clips for binary anchors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ZERO_NORM_TOL = 1e-12  # below this ||z - a||_p the candidate counts as the anchor
PROB_FLOOR = 1e-15     # log-loss probability floor


def lp_gradient(z, anchor, p: float, zero_norm_tol: float = ZERO_NORM_TOL) -> np.ndarray:
    """Gradient of z -> ||z - anchor||_p: sign(z-a) * |z-a|^(p-1) / ||z-a||_p^(p-1).

    For p = 1 this is sign(z - a) with sign(0) = 0.  Rows with
    ||z - a||_p <= zero_norm_tol get the zero subgradient.  Accepts single
    vectors or (m, k) batches.
    """
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    z = np.asarray(z, dtype=float)
    a = np.asarray(anchor, dtype=float)
    d = np.atleast_2d(z - a)
    absd = np.abs(d)
    if p == 1.0:
        g = np.sign(d)
        norm = absd.sum(axis=1)
    else:
        norm = (absd ** p).sum(axis=1) ** (1.0 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.sign(d) * absd ** (p - 1.0) / norm[:, None] ** (p - 1.0)
    g[norm <= zero_norm_tol] = 0.0
    return g[0] if z.ndim == 1 and np.asarray(anchor).ndim == 1 else g


@dataclass(frozen=True)
class AnchoredLpLoss:
    """Anchored Lp loss at a fixed anchor on the simplex."""

    anchor: np.ndarray
    p: float = 1.0
    zero_norm_tol: float = ZERO_NORM_TOL

    def loss(self, z, y_label: int) -> float:
        return lp_anchored_loss(z, y_label, self)


def lp_anchored_loss(z, y_label: int, loss: AnchoredLpLoss) -> float:
    """<grad ||z - a||_p, a - e_y>; exactly zero when z sits at the anchor."""
    a = np.asarray(loss.anchor, dtype=float)
    g = lp_gradient(np.asarray(z, dtype=float), a, loss.p, loss.zero_norm_tol)
    return float(g @ a - g[int(y_label)])


def anchored_lp_terms(Z, A, labels, p: float, zero_norm_tol: float = ZERO_NORM_TOL) -> np.ndarray:
    """Batch anchored Lp losses for per-row anchors: (m,) array of <g_i, a_i - e_{y_i}>."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    labels = np.asarray(labels)
    g = lp_gradient(Z, A, p, zero_norm_tol)
    return (g * A).sum(axis=1) - g[np.arange(len(labels)), labels]


def brier_loss(prob, y_label: int) -> float:
    """Squared Euclidean distance to the one-hot label."""
    prob = np.asarray(prob, dtype=float)
    e = np.zeros_like(prob)
    e[int(y_label)] = 1.0
    return float(((prob - e) ** 2).sum())


def brier_terms(P, labels) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    rows = np.arange(P.shape[0])
    return (P ** 2).sum(axis=1) - 2.0 * P[rows, labels] + 1.0


def log_loss(prob, y_label: int, floor: float = PROB_FLOOR) -> float:
    """-log of the probability put on the realized label, floored at 1e-15."""
    prob = np.asarray(prob, dtype=float)
    return float(-np.log(max(prob[int(y_label)], floor)))


def log_loss_terms(P, labels, floor: float = PROB_FLOOR) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    picked = P[np.arange(P.shape[0]), labels]
    return -np.log(np.maximum(picked, floor))


@dataclass(frozen=True)
class GeneralDistanceLoss:
    """Loss built from a convex distance D to a fixed anchor, minimized 0 there.

    loss(z, y) = -D(z) - <e_y - z, grad D(z)>.  Proper for the divergence D as
    long as D is convex with grad D(anchor) = 0.
    """

    anchor: np.ndarray
    distance: object      # callable z -> float
    subgradient: object   # callable z -> vector


def general_distance_loss(z, y_label: int, loss: GeneralDistanceLoss) -> float:
    z = np.asarray(z, dtype=float)
    g = np.asarray(loss.subgradient(z), dtype=float)
    e = np.zeros_like(z)
    e[int(y_label)] = 1.0
    return float(-loss.distance(z) - (e - z) @ g)


def power_distance_terms(Z, A, labels, p: float, zero_norm_tol: float = ZERO_NORM_TOL) -> np.ndarray:
    """Batch losses for D(z) = ||z - a||_p^p = sum |z_i - a_i|^p (per-row anchors)."""
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    labels = np.asarray(labels)
    d = Z - A
    absd = np.abs(d)
    D = (absd ** p).sum(axis=1)
    g = p * np.sign(d) * absd ** (p - 1.0)  # 0^0 = 1 and sign(0) = 0 keep grad(a) = 0 at p = 1
    rows = np.arange(len(labels))
    terms = -D - ((g * (-Z)).sum(axis=1) + g[rows, labels])
    terms[D ** (1.0 / p) <= zero_norm_tol] = 0.0
    return terms


# ---------------------------------------------------------------------------
# one-sided clips for binary anchors
# ---------------------------------------------------------------------------

def _clip_over(z, f):
    # keep z only where it moves from the anchor toward 1/2
    return np.where(f > 0.5, np.minimum(z, f), np.where(f < 0.5, np.maximum(z, f), 0.5))


def _clip_under(z, f):
    # keep z only where it moves from the anchor away from 1/2
    return np.where(f > 0.5, np.maximum(z, f), np.where(f < 0.5, np.minimum(z, f), 0.5))


def _pair(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.stack([v, 1.0 - v], axis=-1)


def over_confidence_loss(z: float, y_label: int, anchor_f: float, p: float = 1.0) -> float:
    """Anchored Lp loss on (z, 1-z), with z clipped so only over-confidence scores.

    z and anchor_f are positive-class probabilities.  For anchor_f > 1/2 the
    candidate is clipped to min(z, anchor_f), for anchor_f < 1/2 to
    max(z, anchor_f); an anchor at exactly 1/2 scores zero either way.
    """
    c = float(_clip_over(np.float64(z), np.float64(anchor_f)))
    base = AnchoredLpLoss(_pair(anchor_f), p)
    return lp_anchored_loss(_pair(c), y_label, base)


def under_confidence_loss(z: float, y_label: int, anchor_f: float, p: float = 1.0) -> float:
    """Mirror of over_confidence_loss: only movement past the anchor away from 1/2 scores."""
    c = float(_clip_under(np.float64(z), np.float64(anchor_f)))
    base = AnchoredLpLoss(_pair(anchor_f), p)
    return lp_anchored_loss(_pair(c), y_label, base)


def over_under_total_terms(z_pos, f_pos, labels, p: float = 1.0):
    """Batch (over, under, total) anchored-loss terms from positive-class scalars.

    All three are evaluated on 2-vectors rebuilt from the scalars, so for
    anchors away from exactly 1/2 the pointwise identity over + under = total
    holds exactly: one clip returns the anchor (zero loss), the other returns z
    unchanged.  An anchor at exactly 1/2 scores zero on both sides.
    """
    z = np.asarray(z_pos, dtype=float)
    f = np.asarray(f_pos, dtype=float)
    A = _pair(f)
    over = anchored_lp_terms(_pair(_clip_over(z, f)), A, labels, p)
    under = anchored_lp_terms(_pair(_clip_under(z, f)), A, labels, p)
    total = anchored_lp_terms(_pair(z), A, labels, p)
    return over, under, total
