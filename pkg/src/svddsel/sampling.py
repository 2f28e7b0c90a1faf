"""Synthetic data generation: SMOTE oversampling and uniform anomaly sampling.

SMOTE creates synthetic normals by interpolating between a training point and
one of its k nearest neighbours: x~ = x_i + u * (x_nn - x_i) with u uniform on
[0, 1].  Uniform box samples play the role of the least-favourable anomaly
law; their acceptance rate under a fitted model is estimated by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import BoundingBox, Dataset, bounding_box
from .kernel import squared_distances
from .rng import make_rng
from .svdd import SvddModel, decision_values

_MC_CHUNK = 8192


def default_mc_count(l: int) -> int:
    """Monte-Carlo sample count keeping the acceptance term stable to ~1%."""
    return max(10000, 100 * l)


@dataclass(frozen=True)
class SmoteConfig:
    """k_neighbors clamps to l - 1 on tiny sets; m = ceil(multiplier * l)."""

    k_neighbors: int = 5
    multiplier: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.multiplier <= 0.0:
            raise ValueError(f"multiplier must be > 0, got {self.multiplier}")


@dataclass(frozen=True)
class SmoteSample:
    """Synthetic points plus the (source, neighbor, u) provenance of each."""

    points: Dataset
    source_idx: np.ndarray
    neighbor_idx: np.ndarray
    u: np.ndarray


def _nearest_neighbors(points: np.ndarray, k: int) -> np.ndarray:
    """Index matrix (l, k) of each row's k nearest rows, self excluded.

    Distance ties are broken toward the lowest index.
    """
    d = squared_distances(points, points)
    np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")
    return order[:, :k]


def smote_sample(train: Dataset, config: SmoteConfig) -> SmoteSample:
    """Generate ceil(multiplier * l) synthetic points with provenance."""
    l = train.l
    if l < 2:
        raise ValueError(f"SMOTE needs at least 2 points, got {l}")
    k = min(config.k_neighbors, l - 1)
    m = math.ceil(config.multiplier * l)
    neighbors = _nearest_neighbors(train.points, k)

    rng = make_rng(config.seed)
    src = rng.integers(0, l, size=m)
    pick = rng.integers(0, k, size=m)
    u = rng.uniform(0.0, 1.0, size=m)
    nn = neighbors[src, pick]

    a = train.points[src]
    b = train.points[nn]
    synthetic = a + u[:, None] * (b - a)
    return SmoteSample(
        points=Dataset(points=synthetic, name=f"{train.name}-smote"),
        source_idx=src,
        neighbor_idx=nn,
        u=u,
    )


def smote_oversample(train: Dataset, config: SmoteConfig) -> Dataset:
    """SMOTE synthetic points without the provenance log."""
    return smote_sample(train, config).points


@dataclass(frozen=True)
class AnomalySampler:
    """Uniform sampler over a box, standing in for the anomaly distribution."""

    box: BoundingBox
    count: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    def sample(self) -> np.ndarray:
        rng = make_rng(self.seed)
        return rng.uniform(self.box.lo, self.box.hi, size=(self.count, self.box.n))


def default_anomaly_sampler(
    train: Dataset, seed: int, count: int | None = None, box_factor: float = 2.0
) -> AnomalySampler:
    """Sampler over the doubled bounding box of the training set."""
    if count is None:
        count = default_mc_count(train.l)
    return AnomalySampler(box=bounding_box(train, box_factor), count=count, seed=seed)


def mc_anomaly_acceptance(model: SvddModel, sampler: AnomalySampler) -> float:
    """Fraction of uniform box samples the model accepts as normal.

    Deterministic for a fixed sampler seed; the estimate is a mean of
    indicators, so it lies in [0, 1].
    """
    if sampler.box.n != model.train_points.n:
        raise ValueError(
            f"dimension mismatch: sampler box is {sampler.box.n}-d, "
            f"model is {model.train_points.n}-d"
        )
    pts = sampler.sample()
    accepted = 0
    for start in range(0, sampler.count, _MC_CHUNK):
        chunk = pts[start : start + _MC_CHUNK]
        accepted += int(np.sum(decision_values(model, chunk) >= 0.0))
    return accepted / sampler.count
