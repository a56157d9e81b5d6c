"""GP regression tests against a dense direct-solve oracle."""

import math

import numpy as np
import pytest

from congames.gp import ConfidenceParams, FactorizationError, GpModel, beta
from congames.kernels import (
    Matern,
    Polynomial,
    Product,
    SquaredExponential,
    evaluate,
    gram,
)

ORACLE_KERNELS = [
    SquaredExponential(lengthscale=1.0),
    SquaredExponential(lengthscale=2.0),
    Matern(lengthscale=1.0, nu=0.5),
    Matern(lengthscale=0.8, nu=1.5),
    Matern(lengthscale=1.2, nu=2.5),
    Polynomial(bias=1.0, lengthscale=2.0, degree=2),
    Product(
        left=SquaredExponential(lengthscale=2.0),
        right=SquaredExponential(lengthscale=0.5),
        split_index=2,
    ),
]


def dense_posterior(kernel, noise_variance, X, y, queries):
    """Direct matrix-solve oracle for the posterior mean and std."""
    K = gram(kernel, X) + noise_variance * np.eye(len(X))
    Kinv = np.linalg.inv(K)
    means, stds = [], []
    for q in queries:
        kvec = np.array([evaluate(kernel, x, q) for x in X])
        means.append(kvec @ Kinv @ y)
        var = evaluate(kernel, q, q) - kvec @ Kinv @ kvec
        stds.append(math.sqrt(max(var, 0.0)))
    return np.array(means), np.array(stds)


def dense_info_gain(kernel, noise_variance, X):
    K = gram(kernel, X)
    sign, logdet = np.linalg.slogdet(np.eye(len(X)) + K / noise_variance)
    assert sign > 0
    return 0.5 * logdet


class TestPosteriorOracle:
    def test_empty_model_is_prior(self):
        model = GpModel(SquaredExponential(lengthscale=1.0), 1.0)
        mean, std = model.posterior(np.array([0.3]))
        assert mean == 0.0
        assert std == pytest.approx(1.0)

    def test_single_observation_hand_value(self):
        # mu = y*k/(k+s2) = 0.5, var = 1 - 1/(1+1) = 0.5
        model = GpModel(SquaredExponential(lengthscale=1.0), 1.0)
        x = np.array([0.7])
        model.add_observation(x, 1.0)
        mean, std = model.posterior(x)
        assert mean == pytest.approx(0.5, rel=1e-8)
        assert std == pytest.approx(math.sqrt(0.5), rel=1e-8)

    def test_sequential_adds_match_dense_fit(self):
        rng = np.random.default_rng(7)
        kernel = SquaredExponential(lengthscale=1.0)
        model = GpModel(kernel, 0.5)
        X = rng.normal(size=(10, 2))
        y = rng.normal(size=10)
        for xi, yi in zip(X, y):
            model.add_observation(xi, yi)
        queries = rng.normal(size=(20, 2))
        means, stds = model.posterior_batch(queries)
        om, os = dense_posterior(kernel, 0.5, X, y, queries)
        np.testing.assert_allclose(means, om, atol=1e-8)
        np.testing.assert_allclose(stds, os, atol=1e-8)

    def test_random_instances_all_kernels(self):
        # mirrors the acceptance sweep at unit scale
        rng = np.random.default_rng(8)
        for kernel in ORACLE_KERNELS:
            dim = kernel.split_index + 1 if isinstance(kernel, Product) else 3
            for _ in range(5):
                t = int(rng.integers(1, 12))
                noise = float(rng.uniform(0.1, 2.0))
                X = rng.normal(size=(t, dim))
                y = rng.normal(size=t)
                model = GpModel(kernel, noise)
                for xi, yi in zip(X, y):
                    model.add_observation(xi, yi)
                queries = rng.normal(size=(8, dim))
                means, stds = model.posterior_batch(queries)
                om, os = dense_posterior(kernel, noise, X, y, queries)
                np.testing.assert_allclose(means, om, atol=1e-8)
                np.testing.assert_allclose(stds, os, atol=1e-8)

    def test_variance_monotone_in_observations(self):
        rng = np.random.default_rng(9)
        model = GpModel(Matern(lengthscale=1.0, nu=1.5), 0.3)
        queries = rng.normal(size=(50, 2))
        _, prev = model.posterior_batch(queries)
        for _ in range(15):
            model.add_observation(rng.normal(size=2), rng.normal())
            _, cur = model.posterior_batch(queries)
            assert np.all(cur <= prev + 1e-9)
            prev = cur

    def test_posterior_batch_matches_scalar(self):
        rng = np.random.default_rng(10)
        model = GpModel(SquaredExponential(lengthscale=1.5), 1.0)
        for _ in range(6):
            model.add_observation(rng.normal(size=2), rng.normal())
        queries = rng.normal(size=(5, 2))
        means, stds = model.posterior_batch(queries)
        for q, m, s in zip(queries, means, stds):
            sm, ss = model.posterior(q)
            assert m == pytest.approx(sm, abs=1e-12)
            assert s == pytest.approx(ss, abs=1e-12)

    def test_nonfinite_observation_rejected(self):
        model = GpModel(SquaredExponential(lengthscale=1.0), 1.0)
        with pytest.raises(ValueError):
            model.add_observation(np.array([0.0]), float("nan"))

    def test_duplicate_points_survive_via_jitter(self):
        # exact duplicates make the noiseless bordered pivot degenerate;
        # observation noise keeps it positive, so this must not raise
        model = GpModel(SquaredExponential(lengthscale=1.0), 1e-6)
        x = np.array([0.5])
        for _ in range(5):
            model.add_observation(x, 1.0)
        mean, _ = model.posterior(x)
        assert mean == pytest.approx(1.0, abs=1e-3)


class TestInfoGain:
    def test_matches_dense_logdet(self):
        rng = np.random.default_rng(11)
        kernel = SquaredExponential(lengthscale=1.0)
        noise = 0.7
        model = GpModel(kernel, noise)
        X = rng.normal(size=(12, 2))
        for i, xi in enumerate(X):
            model.add_observation(xi, rng.normal())
            expected = dense_info_gain(kernel, noise, X[: i + 1])
            assert model.running_info_gain == pytest.approx(expected, abs=1e-8)

    def test_starts_at_zero_and_grows(self):
        model = GpModel(SquaredExponential(lengthscale=1.0), 1.0)
        assert model.running_info_gain == 0.0
        model.add_observation(np.array([0.0]), 0.1)
        assert model.running_info_gain > 0.0


class TestBeta:
    def test_hand_value(self):
        params = ConfidenceParams(
            rkhs_bound=1.0, noise_scale=1.0, failure_prob=0.5, num_constraints=1
        )
        expected = 1.0 + math.sqrt(2.0 * (1.0 + math.log(8.0)))
        assert beta(params, 0.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(3.48167, abs=5e-5)

    def test_zero_noise_degenerates_to_rkhs_bound(self):
        params = ConfidenceParams(
            rkhs_bound=2.5, noise_scale=0.0, failure_prob=0.1, num_constraints=0
        )
        assert beta(params, 3.0) == pytest.approx(2.5)

    def test_monotone_in_info_gain(self):
        rng = np.random.default_rng(12)
        params = ConfidenceParams(
            rkhs_bound=1.0, noise_scale=1.0, failure_prob=0.1, num_constraints=1
        )
        for _ in range(50):
            g1, g2 = sorted(rng.uniform(0, 20, size=2))
            assert beta(params, g1) <= beta(params, g2)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            ConfidenceParams(
                rkhs_bound=-1.0, noise_scale=1.0, failure_prob=0.1, num_constraints=0
            )
        with pytest.raises(ValueError):
            ConfidenceParams(
                rkhs_bound=1.0, noise_scale=1.0, failure_prob=1.5, num_constraints=0
            )


class TestConfidenceBounds:
    def test_ucb_lcb_symmetric_around_mean(self):
        rng = np.random.default_rng(13)
        model = GpModel(SquaredExponential(lengthscale=1.0), 1.0)
        for _ in range(5):
            model.add_observation(rng.normal(size=1), rng.normal())
        x = np.array([0.2])
        mean, std = model.posterior(x)
        b = 2.0
        assert model.ucb(x, b) == pytest.approx(mean + b * std)
        assert model.lcb(x, b) == pytest.approx(mean - b * std)
        X = rng.normal(size=(4, 1))
        means, stds = model.posterior_batch(X)
        np.testing.assert_allclose(model.ucb_batch(X, b), means + b * stds)
        np.testing.assert_allclose(model.lcb_batch(X, b), means - b * stds)
