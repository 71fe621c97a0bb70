"""Why cross-validate the recalibrator: a lower bound you can trust.

Binning estimators (ECE) inflate on finite samples — even a perfectly
calibrated model scores well above zero.  Fitting a recalibration map and
measuring the risk it removes gives an estimate whose expectation can only sit
at or BELOW the true calibration error, provided the map is fitted on held-out
folds.  Fit in-sample instead and the bias flips sign.

This script reproduces that picture on two synthetic binary scenarios with a
Monte Carlo ground truth.  All numbers are scalar-convention |f - E[Y|f]|.
"""

import numpy as np

from calerr import (
    MetricSpec,
    RecalibratorSpec,
    Scenario,
    binned_ece_binary,
    estimate_ce_cv,
    estimate_ce_insample,
    make_dataset,
    true_ce_monte_carlo,
)

L1 = MetricSpec("lp", 1.0)
ISO = RecalibratorSpec("isotonic")


def summarize(kind: str, n: int, reps: int = 20):
    truth, _ = true_ce_monte_carlo(Scenario(kind, seed=0), 1.0, 300_000, seed=0)
    rows = []
    for r in range(reps):
        d = make_dataset(Scenario(kind, seed=1000 + r), n)
        cv = estimate_ce_cv(d, L1, ISO, k_folds=5, seed=r).estimate / 2
        ins = estimate_ce_insample(d, L1, ISO).estimate / 2
        ece = binned_ece_binary(d, n_bins=15)
        rows.append((cv, ins, ece))
    mean = np.asarray(rows).mean(axis=0)
    print(f"\n{kind}, n={n}, {reps} seeds (truth = {truth / 2:.4f})")
    print(f"  {'estimator':<22}{'mean':>9}   note")
    print(f"  {'CV variational':<22}{mean[0]:>9.4f}   never biased upward")
    print(f"  {'in-sample variational':<22}{mean[1]:>9.4f}   overfits the recalibrator")
    print(f"  {'15-bin ECE':<22}{mean[2]:>9.4f}   inflates at small n")


def main():
    summarize("calibrated", 1000)       # truth is exactly 0 here
    summarize("binary_overconfident", 1000)
    summarize("binary_overconfident", 10000)
    print("\nThe CV column tracks the truth from below; the other two drift up.")


if __name__ == "__main__":
    main()
