import numpy as np
import pytest

from peerbo.forest import (
    Forest,
    ForestParams,
    fit,
    reduced_max_features,
)


def total_variance_oracle(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Recombine per-tree moments with the law of total variance.

    Independent of the fused prediction kernel: per-tree matrices are
    reduced with numpy, expected within-tree variance plus population
    variance of the tree means.
    """
    mu_t, var_t = forest.per_tree(X)
    return np.mean(var_t, axis=0) + np.var(mu_t, axis=0)


def two_cluster_data(rng):
    """1-D regression with a hole in the middle of the support."""
    x_left = rng.uniform(0.0, 1.0, 40)
    x_right = rng.uniform(3.0, 4.0, 40)
    x = np.concatenate([x_left, x_right])
    y = np.sin(x) + rng.normal(0.0, 0.05, x.size)
    return x.reshape(-1, 1), y


class TestFitBasics:
    def test_fit_returns_metadata(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(30, 3))
        y = rng.uniform(size=30)
        forest = fit(X, y, ForestParams(n_tree=7), rng)
        assert forest.n_tree == 7
        assert forest.n_features == 3
        assert forest.n_samples == 30
        assert forest.y_range == (y.min(), y.max())

    def test_deterministic_given_rng_state(self):
        X = np.random.default_rng(1).uniform(size=(40, 2))
        y = np.random.default_rng(2).uniform(size=40)
        params = ForestParams(n_tree=11)
        q = np.random.default_rng(3).uniform(size=(15, 2))
        p1 = fit(X, y, params, np.random.default_rng(42)).predict(q)
        p2 = fit(X, y, params, np.random.default_rng(42)).predict(q)
        np.testing.assert_array_equal(p1.mu, p2.mu)
        np.testing.assert_array_equal(p1.sigma, p2.sigma)

    def test_single_sample_tree_is_a_leaf(self):
        rng = np.random.default_rng(4)
        forest = fit(np.array([[0.5]]), np.array([2.0]),
                     ForestParams(n_tree=3, bootstrap=False), rng)
        root = forest.node(0, 0)
        assert root.is_leaf
        assert root.leaf_mu == 2.0
        assert root.leaf_n == 1

    def test_mean_predictions_stay_within_target_range(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(-1.0, 1.0, size=(60, 2))
        y = rng.uniform(-5.0, 7.0, size=60)
        forest = fit(X, y, ForestParams(n_tree=9), rng)
        q = rng.uniform(-3.0, 3.0, size=(200, 2))
        mu = forest.predict(q).mu
        assert mu.min() >= y.min() - 1e-12
        assert mu.max() <= y.max() + 1e-12

    def test_exact_interpolation_without_bootstrap(self):
        # Full-depth trees on the original sample reproduce the
        # training targets exactly, under either split rule.
        rng = np.random.default_rng(6)
        X = rng.uniform(size=(25, 2))
        y = rng.uniform(size=25)
        for rule in ("random", "best"):
            params = ForestParams(n_tree=5, bootstrap=False,
                                  min_samples_leaf=1, split_rule=rule)
            pred = fit(X, y, params, np.random.default_rng(7)).predict(X)
            np.testing.assert_allclose(pred.mu, y, rtol=0, atol=1e-12)
            np.testing.assert_allclose(pred.sigma, 0.0, atol=1e-12)

    def test_min_samples_leaf_honored(self):
        # Bootstrap duplicates can collapse a node's targets to a single
        # value; such zero-variance leaves may be small, all others must
        # meet the bound.
        rng = np.random.default_rng(8)
        X = rng.uniform(size=(80, 2))
        y = rng.uniform(size=80)
        forest = fit(X, y, ForestParams(n_tree=6, min_samples_leaf=5), rng)
        for t in range(forest.n_tree):
            stack = [0]
            while stack:
                node = forest.node(t, stack.pop())
                if node.is_leaf:
                    assert node.leaf_n >= 5 or node.leaf_var == 0.0
                else:
                    stack.extend((node.left, node.right))

    def test_input_validation(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(size=(10, 2))
        y = rng.uniform(size=10)
        with pytest.raises(ValueError):
            fit(X[0], y, ForestParams(), rng)
        with pytest.raises(ValueError):
            fit(X, y[:5], ForestParams(), rng)
        with pytest.raises(ValueError):
            fit(np.empty((0, 2)), np.empty(0), ForestParams(), rng)
        forest = fit(X, y, ForestParams(n_tree=2), rng)
        with pytest.raises(ValueError):
            forest.predict(np.zeros((4, 3)))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            ForestParams(n_tree=0)
        with pytest.raises(ValueError):
            ForestParams(min_samples_leaf=0)
        with pytest.raises(ValueError):
            ForestParams(split_rule="median")

    def test_reduced_max_features(self):
        assert reduced_max_features(1) == 1
        assert reduced_max_features(2) == 1
        assert reduced_max_features(30) == 4
        assert reduced_max_features(256) == 8

    def test_feature_reduction_shrinks_split_width(self):
        assert ForestParams(feature_reduction=True) \
            .effective_max_features(30) == 4
        assert ForestParams().effective_max_features(30) == 30
        assert ForestParams(max_features=10).effective_max_features(3) == 3


class TestTotalVariance:
    def test_predict_matches_per_tree_recombination(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            m = int(rng.integers(2, 60))
            d = int(rng.integers(1, 6))
            params = ForestParams(
                n_tree=int(rng.integers(1, 20)),
                min_samples_leaf=int(rng.integers(1, 4)),
                bootstrap=bool(rng.integers(0, 2)),
                split_rule=("random", "best")[int(rng.integers(0, 2))],
            )
            X = rng.uniform(-2.0, 2.0, size=(m, d))
            y = rng.normal(size=m)
            forest = fit(X, y, params, rng)
            q = rng.uniform(-2.5, 2.5, size=(12, d))
            np.testing.assert_allclose(
                forest.predict(q).variance,
                total_variance_oracle(forest, q),
                rtol=1e-12, atol=1e-15,
            )

    def test_sigma_is_root_of_variance(self):
        rng = np.random.default_rng(11)
        X = rng.uniform(size=(30, 2))
        y = rng.normal(size=30)
        forest = fit(X, y, ForestParams(n_tree=8), rng)
        pred = forest.predict(X)
        np.testing.assert_allclose(pred.variance, pred.sigma ** 2)

    def test_bootstrap_creates_tree_disagreement(self):
        rng = np.random.default_rng(12)
        X = rng.uniform(size=(50, 1))
        y = rng.normal(size=50)
        forest = fit(X, y, ForestParams(n_tree=20), rng)
        mu_t, _ = forest.per_tree(rng.uniform(size=(10, 1)))
        assert np.var(mu_t, axis=0).max() > 0.0


class TestGapUncertainty:
    def test_uncertainty_higher_in_unobserved_gap(self):
        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            X, y = two_cluster_data(rng)
            forest = fit(X, y, ForestParams(n_tree=40), rng)
            gap = np.linspace(1.5, 2.5, 50).reshape(-1, 1)
            trained = np.concatenate([
                np.linspace(0.25, 0.75, 25),
                np.linspace(3.25, 3.75, 25),
            ]).reshape(-1, 1)
            s_gap = forest.predict(gap).sigma.mean()
            s_train = forest.predict(trained).sigma.mean()
            wins += s_gap > s_train
        assert wins >= 18
