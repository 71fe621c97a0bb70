"""A tour of the anchored Lp losses that power the estimator.

The estimator needs, for every distance d(z, q) it reports, a per-sample loss
whose expected gap equals that distance.  For Lp norms the trick is a loss
anchored at the prediction f: it is zero at the anchor, linear in the label,
and its expectation under Y ~ q equals -||q - a||_p.  Minimizing expected loss
in z therefore recovers q exactly (propriety), and the gap to the minimum is
the Lp calibration distance.
"""

import numpy as np

from calerr import lp_anchored_loss, lp_gradient
from calerr.losses import AnchoredLpLoss, anchored_lp_terms


def expected_loss(z, anchor, q, p):
    loss = AnchoredLpLoss(anchor=np.asarray(anchor, dtype=float), p=p)
    zv = np.asarray(z, dtype=float)
    return sum(qy * lp_anchored_loss(zv, y, loss) for y, qy in enumerate(q))


def main():
    anchor = np.array([0.7, 0.2, 0.1])
    q = np.array([0.5, 0.3, 0.2])

    print("Gradient of ||z - a||_2 at z = (0.9, 0.05, 0.05):")
    print(" ", lp_gradient(np.array([0.9, 0.05, 0.05]), anchor, 2.0))

    print("\nExpected loss under Y ~ q, anchored at a, p = 2:")
    for z in (q, anchor, np.array([1 / 3, 1 / 3, 1 / 3])):
        print(f"  z = {np.round(z, 3)}:  {expected_loss(z, anchor, q, 2.0): .6f}")
    print(f"  -||q - a||_2        = {-np.linalg.norm(q - anchor): .6f}  (minimum, at z = q)")

    print("\nSame check across p, 2000 random z per p — the minimum never moves:")
    rng = np.random.default_rng(5)
    for p in (1.0, 1.5, 2.0, 3.0):
        zs = rng.dirichlet(np.ones(3), 2000)
        vals = [expected_loss(z, anchor, q, p) for z in zs]
        at_q = expected_loss(q, anchor, q, p)
        print(f"  p = {p}: min over random z = {min(vals): .6f} >= at q = {at_q: .6f}")

    print("\nPer-sample view: loss(f, y) is 0, so the plug-in gap is just")
    print("-loss(g(f), y) averaged over samples.  One batch:")
    Z = np.array([[0.5, 0.3, 0.2], [0.6, 0.3, 0.1]])
    A = np.array([[0.7, 0.2, 0.1], [0.6, 0.3, 0.1]])
    labels = np.array([0, 2])
    print("  anchored_lp_terms:", anchored_lp_terms(Z, A, labels, 2.0))
    print("  (second row sits at its anchor, so its loss is exactly 0)")


if __name__ == "__main__":
    main()
