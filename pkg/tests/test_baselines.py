import numpy as np
import pytest

from calerr.baselines import binned_ece_binary, clustered_ece_multiclass
from calerr.core import LabeledDataset
from calerr.synthetic import Scenario, make_dataset, true_ce_monte_carlo


def binary(P0, labels):
    P0 = np.asarray(P0, dtype=float)
    return LabeledDataset(np.column_stack([P0, 1.0 - P0]), np.asarray(labels))


class TestBinnedEce:
    def test_exactly_calibrated_bin_scores_zero(self):
        # 10 samples at 0.7 with exactly 7 positives
        d = binary([0.7] * 10, [0] * 7 + [1] * 3)
        assert binned_ece_binary(d, 15) < 1e-12

    def test_constant_overconfidence_recovered(self):
        d = binary([0.8] * 100, [0] * 100)
        assert abs(binned_ece_binary(d, 15) - 0.2) < 1e-12

    def test_single_bin_reduces_to_mean_gap(self):
        rng = np.random.default_rng(80)
        p = rng.uniform(0.0, 1.0, 500)
        labels = (rng.random(500) >= 0.5).astype(int)
        d = binary(p, labels)
        want = abs((labels == 0).mean() - p.mean())
        assert abs(binned_ece_binary(d, 1) - want) < 1e-12

    def test_row_order_invariant(self):
        rng = np.random.default_rng(81)
        p = rng.uniform(0.0, 1.0, 400)
        labels = rng.integers(0, 2, 400)
        d = binary(p, labels)
        perm = rng.permutation(400)
        d2 = binary(p[perm], labels[perm])
        assert binned_ece_binary(d, 15) == binned_ece_binary(d2, 15)

    def test_last_bin_closed(self):
        d = binary([1.0, 1.0], [0, 0])
        assert binned_ece_binary(d, 15) == 0.0

    def test_equal_count_keeps_ties_together(self):
        # mass point at 0.5 cannot be split across quantile bins
        p = np.array([0.5] * 90 + [0.9] * 10)
        labels = np.array([0] * 45 + [1] * 45 + [0] * 9 + [1] * 1)
        d = binary(p, labels)
        got = binned_ece_binary(d, 4, scheme="equal_count")
        assert abs(got - 0.0) < 1e-12  # 0.5 bin exactly calibrated, 0.9 bin = 0
        p2 = np.array([0.5] * 90 + [0.9] * 10)
        labels2 = np.array([0] * 45 + [1] * 45 + [1] * 10)
        got2 = binned_ece_binary(binary(p2, labels2), 4, scheme="equal_count")
        assert abs(got2 - 0.1 * 0.9) < 1e-12

    def test_positive_on_finite_calibrated_sample(self):
        d = make_dataset(Scenario("calibrated", seed=3), 10_000)
        ece = binned_ece_binary(d, 15)
        assert 0.0 < ece < 0.1

    def test_bad_inputs(self):
        rng = np.random.default_rng(82)
        d3 = LabeledDataset(rng.dirichlet(np.ones(3), size=10), rng.integers(0, 3, 10))
        with pytest.raises(ValueError):
            binned_ece_binary(d3, 15)
        d = binary([0.5, 0.5], [0, 1])
        with pytest.raises(ValueError):
            binned_ece_binary(d, 0)
        with pytest.raises(ValueError):
            binned_ece_binary(d, 15, scheme="whatever")


class TestClusteredEce:
    def test_single_cluster_is_global_gap(self):
        rng = np.random.default_rng(83)
        P = rng.dirichlet(np.ones(3), size=200)
        labels = rng.integers(0, 3, 200)
        d = LabeledDataset(P, labels)
        got = clustered_ece_multiclass(d, 1, seed=0)
        onehot = np.eye(3)[labels]
        want = np.linalg.norm(onehot.mean(axis=0) - P.mean(axis=0))
        assert abs(got - want) < 1e-12

    def test_row_order_invariant_for_fixed_seed(self):
        rng = np.random.default_rng(84)
        P = rng.dirichlet(np.ones(3), size=600)
        labels = rng.integers(0, 3, 600)
        d = LabeledDataset(P, labels)
        perm = rng.permutation(600)
        d2 = LabeledDataset(P[perm], labels[perm])
        a = clustered_ece_multiclass(d, 30, seed=7)
        b = clustered_ece_multiclass(d2, 30, seed=7)
        assert a == b

    def test_overconfident_scenario_exceeds_truth_at_small_n(self):
        s = Scenario("multiclass_overconfident", classes=3, seed=11)
        d = make_dataset(s, 300)
        true, _ = true_ce_monte_carlo(s, 2.0, n_samples=300_000, seed=500)
        got = clustered_ece_multiclass(d, 30, seed=0)
        assert got > 0.0
        assert got > true  # cell noise inflates the binned gap at small n

    def test_more_points_than_clusters_not_required(self):
        rng = np.random.default_rng(85)
        P = rng.dirichlet(np.ones(3), size=10)
        d = LabeledDataset(P, rng.integers(0, 3, 10))
        got = clustered_ece_multiclass(d, 30, seed=0)
        assert np.isfinite(got) and got >= 0.0
