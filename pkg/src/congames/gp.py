"""Incremental Gaussian-process regression with confidence bounds.

The model keeps a bordered Cholesky factor of (Gram + noise * I) that is
extended by one row per observation, so posterior queries stay cheap and
sequential fits match a from-scratch dense solve to numerical precision.
It also tracks the realized information gain of the observed points,
0.5 * logdet(I + K / noise), which feeds the confidence-width schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .kernels import KernelSpec, cross, evaluate

BASE_JITTER = 1e-10
MAX_JITTER = 1e-4


class FactorizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConfidenceParams:
    """Inputs to the confidence-width schedule for one unknown function."""

    rkhs_bound: float
    noise_scale: float
    failure_prob: float
    num_constraints: int = 0

    def __post_init__(self):
        if self.rkhs_bound <= 0:
            raise ValueError("rkhs_bound must be positive")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")
        if not 0.0 < self.failure_prob < 1.0:
            raise ValueError("failure_prob must lie in (0, 1)")
        if self.num_constraints < 0:
            raise ValueError("num_constraints must be nonnegative")


def beta(params: ConfidenceParams, info_gain_prev: float) -> float:
    """Confidence multiplier B + sigma * sqrt(2(gamma + 1 + log(2(M+1)/delta)))."""
    if info_gain_prev < 0:
        raise ValueError("info_gain_prev must be nonnegative")
    log_term = math.log(2.0 * (params.num_constraints + 1) / params.failure_prob)
    return params.rkhs_bound + params.noise_scale * math.sqrt(
        2.0 * (info_gain_prev + 1.0 + log_term)
    )


class GpModel:
    """Kernel regression state answering posterior mean/std queries.

    Mutated only by :meth:`add_observation`; queries are read-only.
    """

    def __init__(self, kernel: KernelSpec, noise_variance: float):
        if noise_variance <= 0:
            raise ValueError("noise_variance must be positive")
        self.kernel = kernel
        self.noise_variance = float(noise_variance)
        self._X: list[np.ndarray] = []
        self._y: list[float] = []
        self._L = np.zeros((0, 0))
        self._alpha = np.zeros(0)
        self.running_info_gain = 0.0

    @property
    def num_observations(self) -> int:
        return len(self._y)

    @property
    def inputs(self) -> np.ndarray:
        return np.asarray(self._X, dtype=float)

    @property
    def targets(self) -> np.ndarray:
        return np.asarray(self._y, dtype=float)

    def add_observation(self, x, y: float) -> "GpModel":
        if not np.isfinite(y):
            raise ValueError("observation target must be finite")
        x = np.asarray(x, dtype=float).ravel()
        kxx = evaluate(self.kernel, x, x)
        _, prev_std = self.posterior(x)
        t = self.num_observations
        diag = kxx + self.noise_variance
        if t == 0:
            piv = diag + BASE_JITTER * diag
            self._L = np.array([[math.sqrt(piv)]])
        else:
            kvec = cross(self.kernel, self.inputs, x[None, :]).ravel()
            c = solve_triangular(self._L, kvec, lower=True)
            jitter = BASE_JITTER * diag
            piv = diag + jitter - c @ c
            while piv <= 0.0 and jitter < MAX_JITTER:
                jitter *= 10.0
                piv = diag + jitter - c @ c
            if piv <= 0.0:
                raise FactorizationError(
                    "Cholesky border update broke down beyond maximum jitter"
                )
            L = np.zeros((t + 1, t + 1))
            L[:t, :t] = self._L
            L[t, :t] = c
            L[t, t] = math.sqrt(piv)
            self._L = L
        self._X.append(x)
        self._y.append(float(y))
        self._alpha = cho_solve((self._L, True), self.targets)
        self.running_info_gain += 0.5 * math.log1p(
            prev_std**2 / self.noise_variance
        )
        return self

    def posterior(self, x) -> tuple[float, float]:
        """Posterior (mean, std) at a single query point."""
        means, stds = self.posterior_batch(np.asarray(x, dtype=float)[None, :])
        return float(means[0]), float(stds[0])

    def posterior_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Posterior means and stds at the rows of X."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        prior_var = np.array(
            [evaluate(self.kernel, row, row) for row in X]
        )
        if self.num_observations == 0:
            return np.zeros(len(X)), np.sqrt(np.maximum(prior_var, 0.0))
        kmat = cross(self.kernel, self.inputs, X)
        means = kmat.T @ self._alpha
        v = solve_triangular(self._L, kmat, lower=True)
        var = prior_var - np.einsum("ij,ij->j", v, v)
        return means, np.sqrt(np.maximum(var, 0.0))

    def ucb(self, x, beta_value: float) -> float:
        if beta_value < 0:
            raise ValueError("beta must be nonnegative")
        mean, std = self.posterior(x)
        return mean + beta_value * std

    def lcb(self, x, beta_value: float) -> float:
        if beta_value < 0:
            raise ValueError("beta must be nonnegative")
        mean, std = self.posterior(x)
        return mean - beta_value * std

    def ucb_batch(self, X, beta_value: float) -> np.ndarray:
        means, stds = self.posterior_batch(X)
        return means + beta_value * stds

    def lcb_batch(self, X, beta_value: float) -> np.ndarray:
        means, stds = self.posterior_batch(X)
        return means - beta_value * stds
