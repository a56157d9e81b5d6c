"""Positive semi-definite kernels and Gram-matrix construction.

Kernels are immutable specs; evaluation is pure, so they can be shared
freely between models and threads.  Inputs are 1-d real vectors (actions
are encoded as integer coordinates cast to float).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import kv


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class SquaredExponential:
    lengthscale: float

    def __post_init__(self):
        if self.lengthscale <= 0:
            raise KernelError("lengthscale must be positive")

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        d2 = _sqdists(X, Y)
        return np.exp(-d2 / (2.0 * self.lengthscale**2))


@dataclass(frozen=True)
class Matern:
    lengthscale: float
    nu: float

    def __post_init__(self):
        if self.lengthscale <= 0 or self.nu <= 0:
            raise KernelError("lengthscale and nu must be positive")

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        s = np.sqrt(_sqdists(X, Y))
        r = s * math.sqrt(2.0 * self.nu) / self.lengthscale
        if self.nu == 0.5:
            return np.exp(-r)
        if self.nu == 1.5:
            return (1.0 + r) * np.exp(-r)
        if self.nu == 2.5:
            return (1.0 + r + r**2 / 3.0) * np.exp(-r)
        # general nu via the modified Bessel function; r=0 handled as the
        # limit value 1
        out = np.ones_like(r)
        pos = r > 0
        rp = r[pos]
        out[pos] = (
            (2.0 ** (1.0 - self.nu) / gamma_fn(self.nu))
            * rp**self.nu
            * kv(self.nu, rp)
        )
        return out


@dataclass(frozen=True)
class Polynomial:
    bias: float
    lengthscale: float
    degree: int

    def __post_init__(self):
        if self.bias < 0:
            raise KernelError("bias must be nonnegative")
        if self.lengthscale <= 0:
            raise KernelError("lengthscale must be positive")
        if self.degree < 1:
            raise KernelError("degree must be a positive integer")

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return (self.bias + X @ Y.T / self.lengthscale) ** self.degree


@dataclass(frozen=True)
class Product:
    """Product of two kernels acting on complementary coordinate blocks.

    The input vector is split at ``split_index``: ``left`` sees coordinates
    ``[:split_index]``, ``right`` sees ``[split_index:]``.
    """

    left: "KernelSpec"
    right: "KernelSpec"
    split_index: int

    def __post_init__(self):
        if self.split_index < 1:
            raise KernelError("split_index must leave a non-empty left block")

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        s = self.split_index
        if s >= X.shape[1]:
            raise KernelError("split_index must leave a non-empty right block")
        return self.left.pairwise(X[:, :s], Y[:, :s]) * self.right.pairwise(
            X[:, s:], Y[:, s:]
        )


KernelSpec = SquaredExponential | Matern | Polynomial | Product


def _sqdists(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - Y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _as_rows(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    return a


def evaluate(spec: KernelSpec, x, y) -> float:
    """Evaluate k(x, y) for two input vectors."""
    X, Y = _as_rows(x), _as_rows(y)
    if X.shape[1] != Y.shape[1]:
        raise KernelError(
            f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}"
        )
    return float(spec.pairwise(X, Y)[0, 0])


def cross(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel matrix between the rows of X and the rows of Y."""
    X, Y = _as_rows(X), _as_rows(Y)
    if X.shape[1] != Y.shape[1]:
        raise KernelError(
            f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}"
        )
    return spec.pairwise(X, Y)


def gram(spec: KernelSpec, points) -> np.ndarray:
    """Symmetric Gram matrix of a non-empty point list."""
    X = _as_rows(np.asarray(points, dtype=float))
    if X.shape[0] == 0:
        raise KernelError("empty point list")
    G = spec.pairwise(X, X)
    return 0.5 * (G + G.T)


def kernel_from_config(obj: dict) -> KernelSpec:
    """Build a kernel from a tagged config object.

    Recognized tags: squared_exponential, matern, polynomial, product.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise KernelError("kernel config must be an object with a 'type' tag")
    tag = obj["type"]
    if tag == "squared_exponential":
        return SquaredExponential(lengthscale=float(obj["lengthscale"]))
    if tag == "matern":
        return Matern(lengthscale=float(obj["lengthscale"]), nu=float(obj["nu"]))
    if tag == "polynomial":
        return Polynomial(
            bias=float(obj.get("bias", 0.0)),
            lengthscale=float(obj.get("lengthscale", 1.0)),
            degree=int(obj["degree"]),
        )
    if tag == "product":
        return Product(
            left=kernel_from_config(obj["left"]),
            right=kernel_from_config(obj["right"]),
            split_index=int(obj["split_index"]),
        )
    raise KernelError(f"unknown kernel type {tag!r}")


def kernel_to_config(spec: KernelSpec) -> dict:
    if isinstance(spec, SquaredExponential):
        return {"type": "squared_exponential", "lengthscale": spec.lengthscale}
    if isinstance(spec, Matern):
        return {"type": "matern", "lengthscale": spec.lengthscale, "nu": spec.nu}
    if isinstance(spec, Polynomial):
        return {
            "type": "polynomial",
            "bias": spec.bias,
            "lengthscale": spec.lengthscale,
            "degree": spec.degree,
        }
    if isinstance(spec, Product):
        return {
            "type": "product",
            "left": kernel_to_config(spec.left),
            "right": kernel_to_config(spec.right),
            "split_index": spec.split_index,
        }
    raise KernelError(f"unknown kernel spec {spec!r}")
