"""Datasets: CSV ingestion, synthetic generators and one-class task construction.

A dataset is an immutable (l, n) float64 matrix of feature rows.  Labels use
the one-class convention +1 = normal, -1 = anomaly; multiclass integer labels
appear only as raw material for :func:`make_one_class_task`.

CSV dialect: comma separated, first row is the header, '.' decimal point,
no quoting of numerics.  Floats are written in their shortest exact decimal
form (up to 17 significant digits), so a write/load round trip is bit-level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .rng import derive_seed, make_rng

# Widening applied to zero-extent box dimensions so uniform sampling stays
# well-posed.
DEGENERATE_EXTENT_EPS = 1e-6


def _format_float(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class Dataset:
    """A sample of l points in R^n."""

    points: np.ndarray
    name: str = "dataset"

    def __post_init__(self) -> None:
        # copy before freezing so the caller's array is never made read-only
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"dataset needs l >= 1 and n >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("dataset contains non-finite entries")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def l(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LabeledDataset:
    """A dataset plus one integer label per row.

    One-class validation sets use labels in {+1, -1}; multiclass sources may
    carry arbitrary integers.
    """

    data: Dataset
    labels: np.ndarray

    def __post_init__(self) -> None:
        lab = np.array(self.labels, dtype=np.int64, copy=True)
        if lab.ndim != 1 or lab.shape[0] != self.data.l:
            raise ValueError(
                f"labels must be 1-d of length {self.data.l}, got shape {lab.shape}"
            )
        lab.flags.writeable = False
        object.__setattr__(self, "labels", lab)

    @property
    def points(self) -> np.ndarray:
        return self.data.points

    @property
    def name(self) -> str:
        return self.data.name

    @property
    def n_normals(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def n_anomalies(self) -> int:
        return int(np.sum(self.labels == -1))

    def check_validation(self) -> None:
        """Require the +1/-1 convention with both signs present."""
        values = set(np.unique(self.labels).tolist())
        if not values <= {1, -1}:
            raise ValueError(f"validation labels must be +1/-1, got {sorted(values)}")
        if self.n_normals < 1 or self.n_anomalies < 1:
            raise ValueError("validation set needs at least one normal and one anomaly")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box lo_d <= x_d <= hi_d."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = np.array(self.lo, dtype=np.float64, copy=True)
        hi = np.array(self.hi, dtype=np.float64, copy=True)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("lo and hi must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi in every dimension")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.all((pts >= self.lo) & (pts <= self.hi), axis=1)


def bounding_box(data: Dataset, factor: float = 1.0) -> BoundingBox:
    """Per-dimension min/max box, with extent scaled by ``factor`` about its center.

    Zero-extent dimensions are widened symmetrically by ``DEGENERATE_EXTENT_EPS``.
    """
    if factor < 1.0:
        raise ValueError(f"factor must be >= 1, got {factor}")
    lo = data.points.min(axis=0)
    hi = data.points.max(axis=0)
    # widen outward from the tight bounds (never recenter: that loses the
    # min/max exactly when coordinate magnitudes differ wildly)
    pad = 0.5 * (hi - lo) * (factor - 1.0)
    pad = np.where(hi == lo, DEGENERATE_EXTENT_EPS, pad)
    return BoundingBox(lo=lo - pad, hi=hi + pad)


def gen_gaussian_mixture(
    seed: int, count: int, means: Sequence[Sequence[float]], name: str = "gaussian-mixture"
) -> Dataset:
    """Draw ``count`` points from an equal-weight mixture of unit-covariance Gaussians.

    Each point picks a component uniformly at random, then adds isotropic
    standard normal noise to that component's mean.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    mu = np.ascontiguousarray(means, dtype=np.float64)
    if mu.ndim != 2:
        raise ValueError("means must share a common dimension")
    rng = make_rng(seed)
    which = rng.integers(0, mu.shape[0], size=count)
    noise = rng.standard_normal(size=(count, mu.shape[1]))
    return Dataset(points=mu[which] + noise, name=name)


def gen_uniform(seed: int, count: int, box: BoundingBox, name: str = "uniform") -> Dataset:
    """Draw ``count`` i.i.d. uniform points from ``box``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = make_rng(seed)
    pts = rng.uniform(box.lo, box.hi, size=(count, box.n))
    return Dataset(points=pts, name=name)


def _parse_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise ValueError(f"{path}: no data rows")
    return header, body


def _cells_to_floats(
    header: list[str], body: list[list[str]], path: str | Path
) -> np.ndarray:
    out = np.empty((len(body), len(header)), dtype=np.float64)
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(
                f"{path}: row {i + 1} has {len(row)} cells, header has {len(header)}"
            )
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric value {cell!r} at row {i + 1}, "
                    f"column {header[j]!r}"
                ) from None
    return out


def load_csv(path: str | Path, label_column: str | None = None) -> LabeledDataset:
    """Load a feature CSV, optionally with a +1/-1 label column.

    Without ``label_column`` every row is labeled +1.  Row order is preserved.
    """
    labeled = load_multiclass_csv(path, label_column)
    if label_column is not None:
        bad = set(np.unique(labeled.labels).tolist()) - {1, -1}
        if bad:
            raise ValueError(
                f"{path}: label column {label_column!r} contains values outside "
                f"{{+1, -1}}: {sorted(bad)}"
            )
    return labeled


def load_multiclass_csv(path: str | Path, label_column: str | None = None) -> LabeledDataset:
    """Load a CSV whose label column may hold arbitrary integer classes."""
    header, body = _parse_csv(path)
    values = _cells_to_floats(header, body, path)
    name = Path(path).stem
    if label_column is None:
        data = Dataset(points=values, name=name)
        return LabeledDataset(data=data, labels=np.ones(data.l, dtype=np.int64))
    if label_column not in header:
        raise ValueError(f"{path}: no column named {label_column!r}")
    li = header.index(label_column)
    raw_labels = values[:, li]
    if np.any(raw_labels != np.round(raw_labels)):
        raise ValueError(f"{path}: label column {label_column!r} contains non-integers")
    feats = np.delete(values, li, axis=1)
    data = Dataset(points=feats, name=name)
    return LabeledDataset(data=data, labels=raw_labels.astype(np.int64))


def save_csv(
    data: Dataset | LabeledDataset,
    path: str | Path,
    label_column: str = "label",
) -> None:
    """Write a dataset as CSV; labeled data gets an extra integer label column."""
    if isinstance(data, LabeledDataset):
        points, labels = data.points, data.labels
    else:
        points, labels = data.points, None
    header = [f"f{j + 1}" for j in range(points.shape[1])]
    if labels is not None:
        header.append(label_column)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(points.shape[0]):
            row = [_format_float(x) for x in points[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)


def make_one_class_task(
    source: LabeledDataset,
    target_class: int,
    anomaly_fraction: float,
    box_factor: float = 2.0,
    val_fraction: float = 0.3,
    seed: int = 0,
) -> tuple[Dataset, LabeledDataset]:
    """Turn one class of a multiclass dataset into a one-class task.

    All rows of ``target_class`` become the normal sample; synthetic anomalies
    (``ceil(anomaly_fraction * #normals)`` of them) are drawn uniformly from
    the normals' bounding box scaled by ``box_factor``.  Normals are split
    train/validation by a seeded shuffle; every synthetic anomaly goes to the
    validation set, so training stays one-class.
    """
    if not 0.0 < anomaly_fraction < 1.0:
        raise ValueError(f"anomaly_fraction must be in (0, 1), got {anomaly_fraction}")
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must be in (0, 1), got {val_fraction}")
    mask = source.labels == target_class
    if not np.any(mask):
        raise ValueError(f"class {target_class} not present in {source.name!r}")
    normals = source.points[mask]
    if normals.shape[0] < 2:
        raise ValueError(f"class {target_class} has fewer than 2 rows")

    l = normals.shape[0]
    n_anom = math.ceil(anomaly_fraction * l)
    box = bounding_box(Dataset(points=normals, name="normals"), box_factor)
    anomalies = gen_uniform(derive_seed(seed, "anomalies"), n_anom, box)

    perm = make_rng(derive_seed(seed, "split")).permutation(l)
    n_val = int(round(val_fraction * l))
    n_val = max(1, min(l - 1, n_val))
    val_rows = normals[perm[:n_val]]
    train_rows = normals[perm[n_val:]]

    base = f"{source.name}-c{target_class}"
    train = Dataset(points=train_rows, name=f"{base}-train")
    val_points = np.vstack([val_rows, anomalies.points])
    val_labels = np.concatenate(
        [np.ones(n_val, dtype=np.int64), -np.ones(n_anom, dtype=np.int64)]
    )
    validation = LabeledDataset(
        data=Dataset(points=val_points, name=f"{base}-val"), labels=val_labels
    )
    return train, validation
