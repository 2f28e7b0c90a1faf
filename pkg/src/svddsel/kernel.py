"""Gaussian kernel and Gram matrix construction.

The kernel is k(x, x') = exp(-||x - x'||^2 / gamma) with gamma dividing the
squared distance directly (not the 1/(2 sigma^2) convention).  Gram matrices
are dense; sample sizes here stay in the low thousands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset


def check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise ValueError(f"gamma must be a positive finite real, got {gamma}")
    return gamma


def squared_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, computed directly (no expansion tricks)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    diff = x[:, None, :] - y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def gauss_kernel(x: np.ndarray, x_prime: np.ndarray, gamma: float) -> float:
    """Evaluate exp(-||x - x'||^2 / gamma) for a single pair of points."""
    gamma = check_gamma(gamma)
    x = np.asarray(x, dtype=np.float64).ravel()
    x_prime = np.asarray(x_prime, dtype=np.float64).ravel()
    if x.shape != x_prime.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {x_prime.shape[0]}")
    d = x - x_prime
    return float(np.exp(-np.dot(d, d) / gamma))


def cross_kernel(x: np.ndarray, y: np.ndarray, gamma: float) -> np.ndarray:
    """Kernel matrix between the rows of ``x`` and the rows of ``y``."""
    gamma = check_gamma(gamma)
    return np.exp(-squared_distances(x, y) / gamma)


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix of a dataset with itself, unit diagonal."""

    values: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {v.shape}")
        if not np.array_equal(v, v.T):
            raise ValueError("Gram matrix must be exactly symmetric")
        if not np.all(np.diag(v) == 1.0):
            raise ValueError("Gram matrix must have a unit diagonal")
        # mathematically entries are in (0, 1]; exact zeros appear when
        # exp(-d^2/gamma) underflows at extreme bandwidths and are accepted
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("Gram entries must lie in [0, 1]")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "gamma", check_gamma(self.gamma))

    @property
    def l(self) -> int:
        return self.values.shape[0]

    def upper_triangle(self) -> np.ndarray:
        """The l(l-1)/2 strictly-upper-triangle entries, row-major order."""
        iu = np.triu_indices(self.l, k=1)
        return self.values[iu]


def gram_matrix(data: Dataset, gamma: float) -> GramMatrix:
    """Kernel matrix of a dataset with itself.

    Each pair is computed once and mirrored, so symmetry is exact; the
    diagonal is set to 1 exactly.
    """
    gamma = check_gamma(gamma)
    k = np.exp(-squared_distances(data.points, data.points) / gamma)
    iu = np.triu_indices(data.l, k=1)
    k[(iu[1], iu[0])] = k[iu]
    np.fill_diagonal(k, 1.0)
    return GramMatrix(values=k, gamma=gamma)
