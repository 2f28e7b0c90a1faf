"""Bandwidth sweeps, risk curves, plateau detection and gamma selection.

A sweep evaluates one risk kind on every point of a log-spaced gamma grid.
Kernel-matrix and polarization risks are Gram-only and never invoke the QP
solver; the other kinds fit one model per grid point.  Grid points are
independent: each gets its own seed derived from (sweep seed, point index),
so curves are reproducible point by point and identical for any job count.
"""

from __future__ import annotations

import csv
import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .dataset import Dataset, LabeledDataset, bounding_box
from .kernel import gram_matrix
from .rng import derive_seed
from .risk import (
    RISK_SENTINEL,
    RiskKind,
    risk_empirical,
    risk_kernel,
    risk_polarization,
    risk_smote,
    risk_sv,
    validation_error,
)
from .sampling import AnomalySampler, SmoteConfig, default_mc_count, smote_oversample
from .svdd import SolverError, SvddConfig, fit, model_stats

VALIDATION_KIND = "validation"

DEFAULT_GRID_STEPS = 50
DEFAULT_GRID_SPAN = 1e2  # grid covers median-sqdist / span .. median-sqdist * span


@dataclass(frozen=True)
class GammaGrid:
    """Strictly increasing positive bandwidth values."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 1 or v.shape[0] < 2:
            raise ValueError("grid needs at least 2 values")
        if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
            raise ValueError("grid values must be positive and finite")
        if np.any(np.diff(v) <= 0.0):
            raise ValueError("grid values must be strictly increasing")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]

    @classmethod
    def log_spaced(cls, gamma_min: float, gamma_max: float, steps: int) -> "GammaGrid":
        if gamma_min <= 0.0 or gamma_max <= gamma_min:
            raise ValueError("need 0 < gamma_min < gamma_max")
        if steps < 2:
            raise ValueError("need at least 2 steps")
        return cls(values=np.geomspace(gamma_min, gamma_max, steps))

    @classmethod
    def auto(
        cls,
        train: Dataset,
        steps: int = DEFAULT_GRID_STEPS,
        span: float = DEFAULT_GRID_SPAN,
    ) -> "GammaGrid":
        """Grid centered on the data scale: median pairwise squared distance."""
        scale = median_sq_distance(train)
        return cls.log_spaced(scale / span, scale * span, steps)


def median_sq_distance(data: Dataset) -> float:
    """Median of the pairwise squared distances (positive pairs as fallback)."""
    diff = data.points[:, None, :] - data.points[None, :, :]
    d = np.einsum("ijk,ijk->ij", diff, diff)
    ut = d[np.triu_indices(data.l, k=1)]
    if ut.size == 0:
        raise ValueError("need at least 2 points to set a bandwidth scale")
    med = float(np.median(ut))
    if med > 0.0:
        return med
    positive = ut[ut > 0.0]
    if positive.size == 0:
        raise ValueError("all points coincide; no bandwidth scale")
    return float(np.median(positive))


class SelectionRule(enum.Enum):
    ARGMIN = "argmin"
    PLATEAU_MAX = "plateau-max"

    @classmethod
    def from_name(cls, name: str) -> "SelectionRule":
        for rule in cls:
            if rule.value == name.lower():
                return rule
        raise ValueError(f"unknown selection rule {name!r}")


@dataclass(frozen=True)
class PlateauSpec:
    rel_tol: float = 0.05
    rule: SelectionRule = SelectionRule.PLATEAU_MAX

    def __post_init__(self) -> None:
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")


def default_plateau_spec(kind: RiskKind, rel_tol: float = 0.05) -> PlateauSpec:
    """Per-kind default: ARGMIN for the SV risk (its plateaus are very wide,
    so plateau-max would pick degenerate large gammas), PLATEAU_MAX otherwise."""
    rule = SelectionRule.ARGMIN if kind is RiskKind.SV else SelectionRule.PLATEAU_MAX
    return PlateauSpec(rel_tol=rel_tol, rule=rule)


@dataclass(frozen=True)
class RiskCurve:
    """One risk value per grid gamma; sentinel entries mark failed points."""

    kind: str
    gammas: np.ndarray
    values: np.ndarray
    nu: float
    seed: int | None = None

    def __post_init__(self) -> None:
        g = np.array(self.gammas, dtype=np.float64, copy=True)
        v = np.array(self.values, dtype=np.float64, copy=True)
        if g.shape != v.shape or g.ndim != 1:
            raise ValueError("gammas and values must be 1-d arrays of equal length")
        if np.any(np.isnan(v)) or np.any(v == -np.inf):
            raise ValueError("curve values must be finite or the +inf sentinel")
        g.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.gammas.shape[0]


def _sweep(point_fn: Callable[[int], float], steps: int, jobs: int) -> np.ndarray:
    if jobs <= 1:
        return np.array([point_fn(i) for i in range(steps)])
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return np.array(list(pool.map(point_fn, range(steps))))


def sweep_risk_curve(
    train: Dataset,
    grid: GammaGrid,
    config: SvddConfig,
    kind: RiskKind,
    seed: int,
    mc_count: int | None = None,
    box_factor: float = 2.0,
    smote_config: SmoteConfig | None = None,
    jobs: int = 1,
) -> RiskCurve:
    """Evaluate ``kind`` on every grid point.

    Fit failures at individual points are recorded as the +inf sentinel
    instead of aborting the sweep.
    """
    box = bounding_box(train, box_factor)
    n_mc = mc_count if mc_count is not None else default_mc_count(train.l)

    if kind is RiskKind.SMOTE:
        if smote_config is None:
            smote_config = SmoteConfig(seed=derive_seed(seed, "smote"))
        synthetic = smote_oversample(train, smote_config)

    def fit_point(i: int):
        return fit(train, float(grid.values[i]), config, seed=derive_seed(seed, "fit", i))

    def mc_sampler(i: int) -> AnomalySampler:
        return AnomalySampler(box=box, count=n_mc, seed=derive_seed(seed, "mc", i))

    if kind is RiskKind.KERNEL:

        def point(i: int) -> float:
            return risk_kernel(gram_matrix(train, float(grid.values[i])))

    elif kind is RiskKind.POLARIZATION:

        def point(i: int) -> float:
            sampler = AnomalySampler(
                box=box, count=train.l, seed=derive_seed(seed, "polar", i)
            )
            return risk_polarization(train, sampler, float(grid.values[i]))

    elif kind is RiskKind.SV:

        def point(i: int) -> float:
            try:
                model = fit_point(i)
            except SolverError:
                return RISK_SENTINEL
            sv_fraction, _ = model_stats(model, train)
            return risk_sv(sv_fraction, config.nu)

    elif kind is RiskKind.EMPIRICAL:

        def point(i: int) -> float:
            try:
                model = fit_point(i)
            except SolverError:
                return RISK_SENTINEL
            return risk_empirical(model, train, config.nu, mc_sampler(i))

    elif kind is RiskKind.SMOTE:

        def point(i: int) -> float:
            try:
                model = fit_point(i)
            except SolverError:
                return RISK_SENTINEL
            return risk_smote(model, synthetic, config.nu, mc_sampler(i))

    else:  # pragma: no cover
        raise ValueError(f"unhandled risk kind {kind}")

    values = _sweep(point, len(grid), jobs)
    return RiskCurve(kind=kind.value, gammas=grid.values, values=values,
                     nu=config.nu, seed=seed)


def sweep_validation_error(
    train: Dataset,
    validation: LabeledDataset,
    grid: GammaGrid,
    config: SvddConfig,
    seed: int,
    jobs: int = 1,
) -> RiskCurve:
    """Validation-error curve over the grid (one fit per point)."""
    validation.check_validation()

    def point(i: int) -> float:
        try:
            model = fit(train, float(grid.values[i]), config,
                        seed=derive_seed(seed, "fit", i))
        except SolverError:
            return RISK_SENTINEL
        return validation_error(model, validation)

    values = _sweep(point, len(grid), jobs)
    return RiskCurve(kind=VALIDATION_KIND, gammas=grid.values, values=values,
                     nu=config.nu, seed=seed)


def find_plateau(curve: RiskCurve, spec: PlateauSpec) -> tuple[int, int]:
    """Longest contiguous run of near-minimal values, as inclusive indices.

    A value belongs to the plateau when it is within rel_tol of the finite
    range above the minimum; sentinel values never qualify.  Ties between
    equal-length runs go to the run at larger gamma.
    """
    vals = curve.values
    finite = np.isfinite(vals)
    if not finite.any():
        raise ValueError("curve has no finite values")
    v_min = float(vals[finite].min())
    v_max = float(vals[finite].max())
    threshold = v_min + spec.rel_tol * (v_max - v_min)
    member = finite & (vals <= threshold)

    best: tuple[int, int] | None = None
    start = None
    for i, ok in enumerate(list(member) + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            run = (start, i - 1)
            if best is None or (run[1] - run[0]) >= (best[1] - best[0]):
                best = run  # >= prefers the later (larger gamma) run on ties
            start = None
    assert best is not None
    return best


def select_gamma(curve: RiskCurve, spec: PlateauSpec) -> float:
    """Operating bandwidth under the given rule.

    ARGMIN returns the gamma of the minimal finite value (smallest gamma on
    ties); PLATEAU_MAX returns the largest gamma in the plateau.
    """
    if spec.rule is SelectionRule.ARGMIN:
        vals = np.where(np.isfinite(curve.values), curve.values, np.inf)
        if not np.isfinite(vals).any():
            raise ValueError("curve has no finite values")
        return float(curve.gammas[int(np.argmin(vals))])
    _, end = find_plateau(curve, spec)
    return float(curve.gammas[end])


def local_minima_count(values: np.ndarray) -> int:
    """Number of discrete local minima, with equal-value runs collapsed.

    A run counts iff every existing neighbour run is strictly larger;
    boundary runs count against their single neighbour.
    """
    vals = [float(v) for v in values]
    runs: list[float] = []
    for v in vals:
        if not runs or runs[-1] != v:
            runs.append(v)
    if len(runs) == 1:
        return 1
    count = 0
    for t, v in enumerate(runs):
        left_ok = t == 0 or runs[t - 1] > v
        right_ok = t == len(runs) - 1 or runs[t + 1] > v
        if left_ok and right_ok:
            count += 1
    return count


def curve_to_csv(curve: RiskCurve, path: str | Path) -> None:
    """Write the plot data: columns gamma, value, kind, nu."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma", "value", "kind", "nu"])
        for g, v in zip(curve.gammas, curve.values):
            writer.writerow([repr(float(g)), repr(float(v)), curve.kind,
                             repr(float(curve.nu))])


def curve_from_csv(path: str | Path) -> RiskCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["gamma", "value", "kind", "nu"]:
        raise ValueError(f"{path}: expected header gamma,value,kind,nu")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: empty curve")
    gammas = np.array([float(r[0]) for r in body])
    values = np.array([float(r[1]) for r in body])
    kinds = {r[2] for r in body}
    nus = {r[3] for r in body}
    if len(kinds) != 1 or len(nus) != 1:
        raise ValueError(f"{path}: mixed kind or nu columns")
    return RiskCurve(kind=kinds.pop(), gammas=gammas, values=values,
                     nu=float(nus.pop()))
