"""Recalibrator choice on multiclass data, against a clustered-ECE baseline.

Every recalibrator yields a valid lower-bound estimate under cross-validation;
a richer map just gets closer to the truth.  Here each built-in recalibrator
scores the same 5-class overconfident predictor, next to the k-means-binned
ECE baseline and a 300k-sample Monte Carlo ground truth (L2 convention).
"""

import numpy as np

from calerr import (
    MetricSpec,
    RecalibratorSpec,
    Scenario,
    clustered_ece_multiclass,
    estimate_ce_cv,
    make_dataset,
    true_ce_monte_carlo,
)

L2 = MetricSpec("lp", 2.0)


def main():
    scenario = Scenario("multiclass_overconfident", classes=5, seed=0)
    truth, mc_se = true_ce_monte_carlo(scenario, 2.0, 300_000, seed=0)
    print(f"truth (Monte Carlo): {truth:.4f} +- {mc_se:.4f}\n")

    specs = [
        ("identity", RecalibratorSpec("identity")),
        ("temperature", RecalibratorSpec("temperature")),
        ("partition (30 cells)", RecalibratorSpec("partition")),
        ("nw (bandwidth 0.1)", RecalibratorSpec("nw")),
        ("isotonic", RecalibratorSpec("isotonic")),
    ]
    for n in (2000, 20_000):
        d = make_dataset(Scenario("multiclass_overconfident", classes=5, seed=7), n)
        print(f"n = {n}:")
        for name, spec in specs:
            rep = estimate_ce_cv(d, L2, spec, k_folds=5, seed=1)
            print(f"  {name:<22}{rep.estimate_clipped:>8.4f}  (+- {rep.stderr:.4f})")
        print(f"  {'clustered ECE (30)':<22}{clustered_ece_multiclass(d, seed=1):>8.4f}"
              "  <- binning, no bound")
        print()

    print("identity removes no risk, so it reports 0; the flexible maps climb")
    print("toward the truth from below as n grows.  The binned baseline lands")
    print("nearby but its bias has no guaranteed sign at any sample size.")


if __name__ == "__main__":
    main()
