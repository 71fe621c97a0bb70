import numpy as np
import pytest

from calerr.losses import (
    AnchoredLpLoss,
    GeneralDistanceLoss,
    anchored_lp_terms,
    brier_loss,
    brier_terms,
    general_distance_loss,
    log_loss,
    log_loss_terms,
    lp_anchored_loss,
    lp_gradient,
    over_confidence_loss,
    over_under_total_terms,
    power_distance_terms,
    under_confidence_loss,
)


def norm_p(v, p):
    return np.abs(v).sum() if p == 1.0 else (np.abs(v) ** p).sum() ** (1.0 / p)


def fd_gradient(z, a, p, delta=1e-6):
    # central finite differences of z -> ||z - a||_p, the independent oracle
    g = np.empty_like(z)
    for i in range(len(z)):
        hi, lo = z.copy(), z.copy()
        hi[i] += delta
        lo[i] -= delta
        g[i] = (norm_p(hi - a, p) - norm_p(lo - a, p)) / (2 * delta)
    return g


def expected_loss(z, q, a, p):
    # brute-force expectation of the anchored loss over labels y ~ q
    loss = AnchoredLpLoss(a, p)
    return sum(q[y] * lp_anchored_loss(z, y, loss) for y in range(len(q)))


def sample_simplex(rng, k, size):
    return rng.dirichlet(np.ones(k), size=size)


class TestLpGradient:
    def test_p1_is_sign(self):
        g = lp_gradient(np.array([0.7, 0.3]), np.array([0.5, 0.5]), 1.0)
        assert np.array_equal(g, [1.0, -1.0])

    def test_p2_frozen_value(self):
        g = lp_gradient(np.array([0.7, 0.3]), np.array([0.5, 0.5]), 2.0)
        assert np.allclose(g, [0.70710678, -0.70710678], atol=1e-8)

    def test_zero_at_anchor(self):
        for p in (1.0, 1.5, 2.0, 3.0):
            g = lp_gradient(np.array([0.2, 0.3, 0.5]), np.array([0.2, 0.3, 0.5]), p)
            assert np.array_equal(g, np.zeros(3))

    def test_p_below_one_rejected(self):
        with pytest.raises(ValueError):
            lp_gradient(np.array([0.7, 0.3]), np.array([0.5, 0.5]), 0.9)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_matches_finite_differences(self, p):
        rng = np.random.default_rng(10)
        checked = 0
        while checked < 200:
            z = sample_simplex(rng, 3, None)
            a = sample_simplex(rng, 3, None)
            if np.abs(z - a).min() < 0.05:
                continue
            g = lp_gradient(z, a, p)
            num = fd_gradient(z, a, p)
            assert np.linalg.norm(g - num) / np.linalg.norm(num) < 1e-5
            checked += 1

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_dual_norm_is_one(self, p):
        # holder conjugate exponent q = p / (p - 1)
        q = p / (p - 1.0)
        rng = np.random.default_rng(11)
        Z = sample_simplex(rng, 4, 300)
        A = sample_simplex(rng, 4, 300)
        G = lp_gradient(Z, A, p)
        dual = (np.abs(G) ** q).sum(axis=1) ** (1.0 / q)
        assert np.all(np.abs(dual - 1.0) < 1e-9)

    def test_p1_components_in_sign_set(self):
        rng = np.random.default_rng(12)
        Z = sample_simplex(rng, 4, 300)
        A = sample_simplex(rng, 4, 300)
        G = lp_gradient(Z, A, 1.0)
        assert set(np.unique(G)).issubset({-1.0, 0.0, 1.0})

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    def test_euler_identity(self, p):
        # <grad, z - a> recovers the norm for positively homogeneous functions
        rng = np.random.default_rng(13)
        Z = sample_simplex(rng, 5, 500)
        A = sample_simplex(rng, 5, 500)
        G = lp_gradient(Z, A, p)
        lhs = (G * (Z - A)).sum(axis=1)
        rhs = np.array([norm_p(z - a, p) for z, a in zip(Z, A)])
        assert np.all(np.abs(lhs - rhs) < 1e-9)


class TestAnchoredLpLoss:
    def test_frozen_example(self):
        loss = AnchoredLpLoss(np.array([0.5, 0.5]), 1.0)
        assert lp_anchored_loss(np.array([0.7, 0.3]), 0, loss) == -1.0

    def test_zero_at_anchor(self):
        rng = np.random.default_rng(14)
        for p in (1.0, 1.5, 2.0, 3.0):
            for _ in range(20):
                a = sample_simplex(rng, 3, None)
                loss = AnchoredLpLoss(a, p)
                y = int(rng.integers(3))
                assert lp_anchored_loss(a.copy(), y, loss) == 0.0

    def test_expected_loss_frozen_example(self):
        q = np.array([0.7, 0.3])
        a = np.array([0.5, 0.5])
        assert abs(expected_loss(q, q, a, 1.0) - (-0.4)) < 1e-12

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("k", [2, 3, 10])
    def test_expected_loss_identity(self, p, k):
        # E_{Y~q} loss_a(q, Y) = -||q - a||_p
        rng = np.random.default_rng(15)
        for _ in range(50):
            q = sample_simplex(rng, k, None)
            a = sample_simplex(rng, k, None)
            assert abs(expected_loss(q, q, a, p) + norm_p(q - a, p)) < 1e-9

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    @pytest.mark.parametrize("k", [2, 3, 10])
    def test_propriety(self, p, k):
        # reporting q is never worse than any other z, in expectation under q
        rng = np.random.default_rng(16)
        for _ in range(50):
            q = sample_simplex(rng, k, None)
            a = sample_simplex(rng, k, None)
            z = sample_simplex(rng, k, None)
            assert expected_loss(z, q, a, p) >= expected_loss(q, q, a, p) - 1e-9

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(17)
        Z = sample_simplex(rng, 3, 100)
        A = sample_simplex(rng, 3, 100)
        labels = rng.integers(0, 3, 100)
        for p in (1.0, 2.0, 3.0):
            batch = anchored_lp_terms(Z, A, labels, p)
            single = [lp_anchored_loss(z, int(y), AnchoredLpLoss(a, p))
                      for z, a, y in zip(Z, A, labels)]
            assert np.allclose(batch, single, atol=1e-12)


class TestProperLosses:
    def test_brier_examples(self):
        assert brier_loss(np.array([1.0, 0.0]), 0) == 0.0
        assert abs(brier_loss(np.array([0.5, 0.5]), 0) - 0.5) < 1e-15
        assert abs(brier_loss(np.array([0.8, 0.2]), 0) - 0.08) < 1e-15

    def test_log_loss_examples(self):
        assert log_loss(np.array([1.0, 0.0]), 0) == 0.0
        assert abs(log_loss(np.array([0.5, 0.5]), 1) - np.log(2.0)) < 1e-15
        assert log_loss(np.array([1.0, 0.0]), 1) == -np.log(1e-15)

    def test_batch_variants(self):
        rng = np.random.default_rng(18)
        P = sample_simplex(rng, 4, 50)
        labels = rng.integers(0, 4, 50)
        bt = brier_terms(P, labels)
        lt = log_loss_terms(P, labels)
        for i in range(50):
            assert abs(bt[i] - brier_loss(P[i], int(labels[i]))) < 1e-12
            assert abs(lt[i] - log_loss(P[i], int(labels[i]))) < 1e-12

    def test_brier_propriety_sampled(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            q = sample_simplex(rng, 3, None)
            z = sample_simplex(rng, 3, None)
            eq = sum(q[y] * brier_loss(q, y) for y in range(3))
            ez = sum(q[y] * brier_loss(z, y) for y in range(3))
            assert ez >= eq - 1e-9


class TestGeneralDistanceLoss:
    def test_frozen_squared_euclidean_example(self):
        a = np.array([0.5, 0.5])
        loss = GeneralDistanceLoss(
            anchor=a,
            distance=lambda z: float(((z - a) ** 2).sum()),
            subgradient=lambda z: 2.0 * (z - a),
        )
        got = general_distance_loss(np.array([0.7, 0.3]), 0, loss)
        assert abs(got - (-0.32)) < 1e-12

    def test_zero_at_anchor(self):
        a = np.array([0.3, 0.3, 0.4])
        loss = GeneralDistanceLoss(
            anchor=a,
            distance=lambda z: float(((z - a) ** 2).sum()),
            subgradient=lambda z: 2.0 * (z - a),
        )
        for y in range(3):
            assert general_distance_loss(a.copy(), y, loss) == 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_consistent_with_anchored_lp(self, p):
        # plugging the norm and its gradient in reproduces the anchored loss
        rng = np.random.default_rng(20)
        for _ in range(50):
            a = sample_simplex(rng, 3, None)
            z = sample_simplex(rng, 3, None)
            y = int(rng.integers(3))
            loss = GeneralDistanceLoss(
                anchor=a,
                distance=lambda zz, a=a: norm_p(zz - a, p),
                subgradient=lambda zz, a=a: lp_gradient(zz, a, p),
            )
            via_general = general_distance_loss(z, y, loss)
            direct = lp_anchored_loss(z, y, AnchoredLpLoss(a, p))
            # the norm term cancels against the euler identity inside the bracket
            assert abs(via_general - direct) < 1e-9

    def test_power_distance_terms_zero_at_anchor(self):
        rng = np.random.default_rng(21)
        A = sample_simplex(rng, 3, 30)
        labels = rng.integers(0, 3, 30)
        for p in (1.0, 2.0, 3.0):
            terms = power_distance_terms(A, A, labels, p)
            assert np.array_equal(terms, np.zeros(30))

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    def test_power_distance_expected_identity_and_propriety(self, p):
        # E_{Y~q} loss(q, Y) = -sum |q - a|^p, and q is the minimizer
        rng = np.random.default_rng(22)
        for _ in range(100):
            q = sample_simplex(rng, 3, None)
            a = sample_simplex(rng, 3, None)
            z = sample_simplex(rng, 3, None)
            eq = sum(q[y] * power_distance_terms(q[None], a[None], [y], p)[0]
                     for y in range(3))
            ez = sum(q[y] * power_distance_terms(z[None], a[None], [y], p)[0]
                     for y in range(3))
            assert abs(eq + (np.abs(q - a) ** p).sum()) < 1e-9
            assert ez >= eq - 1e-9


class TestOverUnder:
    def test_frozen_over_example(self):
        # anchor 0.8, candidate 0.6: movement toward 1/2, the over side keeps it
        got = over_confidence_loss(0.6, 0, 0.8, 1.0)
        assert abs(got - 0.4) < 1e-12

    def test_over_clips_away_movement(self):
        # candidate 0.9 moves past the anchor away from 1/2: over side sees the anchor
        assert over_confidence_loss(0.9, 0, 0.8, 1.0) == 0.0
        assert over_confidence_loss(0.9, 1, 0.8, 1.0) == 0.0

    def test_under_keeps_away_movement(self):
        got = under_confidence_loss(0.9, 0, 0.8, 1.0)
        # oracle: plain anchored loss of (0.9, 0.1) at anchor (0.8, 0.2)
        want = lp_anchored_loss(np.array([0.9, 0.1]), 0, AnchoredLpLoss(np.array([0.8, 0.2]), 1.0))
        assert got == want and got != 0.0

    def test_under_clips_toward_movement(self):
        assert under_confidence_loss(0.6, 0, 0.8, 1.0) == 0.0

    def test_half_anchor_scores_zero(self):
        for z in (0.1, 0.5, 0.9):
            for y in (0, 1):
                assert over_confidence_loss(z, y, 0.5, 1.0) == 0.0
                assert under_confidence_loss(z, y, 0.5, 1.0) == 0.0

    def test_low_anchor_sides_mirror(self):
        # anchor below 1/2: moving up (toward 1/2) is the over-confident side
        assert over_confidence_loss(0.3, 0, 0.2, 1.0) != 0.0
        assert under_confidence_loss(0.3, 0, 0.2, 1.0) == 0.0
        assert over_confidence_loss(0.1, 0, 0.2, 1.0) == 0.0
        assert under_confidence_loss(0.1, 0, 0.2, 1.0) != 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_decomposition_identity_grid(self, p):
        zs = np.linspace(0.01, 0.99, 25)
        fs = np.concatenate([np.linspace(0.01, 0.49, 12), np.linspace(0.51, 0.99, 12)])
        Z, F = [g.ravel() for g in np.meshgrid(zs, fs)]
        for y in (0, 1):
            labels = np.full(Z.shape, y, dtype=int)
            over, under, total = over_under_total_terms(Z, F, labels, p)
            assert np.array_equal(over + under, total)

    def test_scalar_batch_agreement(self):
        rng = np.random.default_rng(23)
        z = rng.uniform(0.01, 0.99, 50)
        f = rng.uniform(0.01, 0.99, 50)
        labels = rng.integers(0, 2, 50)
        over, under, _ = over_under_total_terms(z, f, labels, 1.0)
        for i in range(50):
            assert abs(over[i] - over_confidence_loss(z[i], int(labels[i]), f[i])) < 1e-12
            assert abs(under[i] - under_confidence_loss(z[i], int(labels[i]), f[i])) < 1e-12
