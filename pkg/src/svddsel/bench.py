"""Benchmark harness: run selection methods over many one-class tasks and
compare them with performance profiles.

Each method is a (risk kind, plateau spec) pair.  Per (task, method) the
harness sweeps the bandwidth grid, selects gamma, refits at the selection and
scores the validation error.  Errors map to positive qualities
(q = 2 - error, clamped away from zero) because the profile formula needs
higher-is-better scores with finite ratios; every report states this
convention.

The profile of a method is p(beta) = fraction of tasks on which the method's
quality is within a factor beta of the per-task best.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Dataset, LabeledDataset, load_multiclass_csv, make_one_class_task
from .risk import RiskKind, validation_error
from .rng import derive_seed
from .select import (
    DEFAULT_GRID_STEPS,
    GammaGrid,
    PlateauSpec,
    select_gamma,
    sweep_risk_curve,
)
from .svdd import SolverError, SvddConfig, fit

QUALITY_FLOOR = 1e-6

DEFAULT_BETA_STEPS = 100
DEFAULT_BETA_MAX = 10.0

DEFAULT_FRACTIONS = (0.05, 0.10, 0.15)


def quality_from_error(err: float) -> float:
    """Map a validation error in [0, 2] to a positive quality score."""
    if not 0.0 <= err <= 2.0:
        raise ValueError(f"validation error must be in [0, 2], got {err}")
    return max(2.0 - err, QUALITY_FLOOR)


@dataclass(frozen=True)
class QualityTable:
    """Positive quality scores, methods along rows, tasks along columns."""

    methods: tuple[str, ...]
    tasks: tuple[str, ...]
    q: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=np.float64, copy=True)
        if q.shape != (len(self.methods), len(self.tasks)):
            raise ValueError(
                f"quality matrix shape {q.shape} does not match "
                f"{len(self.methods)} methods x {len(self.tasks)} tasks"
            )
        if np.any(q <= 0.0):
            raise ValueError("quality scores must be positive")
        q.flags.writeable = False
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class DolanMoreCurve:
    method: str
    beta_grid: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        b = np.array(self.beta_grid, dtype=np.float64, copy=True)
        p = np.array(self.p, dtype=np.float64, copy=True)
        if b.shape != p.shape or b.ndim != 1:
            raise ValueError("beta_grid and p must be 1-d arrays of equal length")
        if np.any(b < 1.0) or np.any(np.diff(b) <= 0.0):
            raise ValueError("beta grid must be increasing with beta >= 1")
        if np.any(np.diff(p) < 0.0) or np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("p must be nondecreasing within [0, 1]")
        b.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "beta_grid", b)
        object.__setattr__(self, "p", p)


def dolan_more_curves(
    table: QualityTable, beta_grid: Sequence[float] | np.ndarray
) -> list[DolanMoreCurve]:
    """Performance profile of every method in the table.

    p_i(beta) = (1/M) |{t : q_it >= max_i q_it / beta}|; ties at beta = 1
    count for all tied methods.
    """
    betas = np.asarray(beta_grid, dtype=np.float64)
    if betas.size == 0:
        raise ValueError("empty beta grid")
    best = table.q.max(axis=0)  # per-task best quality
    curves = []
    for i, method in enumerate(table.methods):
        # (steps, tasks) comparison against the per-task threshold best/beta
        hits = table.q[i][None, :] >= best[None, :] / betas[:, None]
        p = hits.mean(axis=1)
        curves.append(DolanMoreCurve(method=method, beta_grid=betas, p=p))
    return curves


def default_beta_grid(table: QualityTable, steps: int = DEFAULT_BETA_STEPS) -> np.ndarray:
    """Log-spaced betas from 1 up to at least the worst best-to-quality ratio,
    so every curve reaches 1 by the end of the grid."""
    worst_ratio = float((table.q.max(axis=0)[None, :] / table.q).max())
    upper = max(DEFAULT_BETA_MAX, worst_ratio)
    return np.geomspace(1.0, upper, steps)


@dataclass(frozen=True)
class MethodSpec:
    kind: RiskKind
    plateau: PlateauSpec

    @property
    def name(self) -> str:
        return f"{self.kind.value}-{self.plateau.rule.value}"


@dataclass(frozen=True)
class BenchRecord:
    task: str
    method: str
    gamma: float
    validation_error: float
    quality: float
    wall_time_sec: float


@dataclass(frozen=True)
class BenchFailure:
    task: str
    method: str
    error: str


@dataclass(frozen=True)
class BenchmarkReport:
    records: tuple[BenchRecord, ...]
    failures: tuple[BenchFailure, ...]
    table: QualityTable
    curves: tuple[DolanMoreCurve, ...]
    config: dict


def run_benchmark(
    tasks: Sequence[tuple[Dataset, LabeledDataset]],
    methods: Sequence[MethodSpec],
    grid: GammaGrid | None,
    config: SvddConfig,
    seed: int,
    mc_count: int | None = None,
    box_factor: float = 2.0,
    beta_steps: int = DEFAULT_BETA_STEPS,
    grid_steps: int | None = None,
    jobs: int = 1,
) -> BenchmarkReport:
    """Sweep, select, refit and score every (task, method) pair.

    ``grid=None`` resolves a per-task auto grid from the training data scale.
    Tasks run concurrently when jobs > 1; failed pairs are recorded (with
    quality floored in the table) and do not abort the batch.
    """
    if not tasks:
        raise ValueError("need at least one task")
    if not methods:
        raise ValueError("need at least one method")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate method names: {names}")
    task_names = [train.name for train, _ in tasks]
    if len(set(task_names)) != len(task_names):
        raise ValueError("task names must be unique")

    auto_steps = grid_steps if grid_steps is not None else DEFAULT_GRID_STEPS

    def run_task(item: tuple[Dataset, LabeledDataset]):
        train, validation = item
        task_grid = grid if grid is not None else GammaGrid.auto(train, steps=auto_steps)
        out = []
        for method in methods:
            started = time.perf_counter()
            run_seed = derive_seed(seed, train.name, method.kind.value)
            try:
                curve = sweep_risk_curve(
                    train,
                    task_grid,
                    config,
                    method.kind,
                    seed=run_seed,
                    mc_count=mc_count,
                    box_factor=box_factor,
                )
                gamma = select_gamma(curve, method.plateau)
                model = fit(train, gamma, config, seed=derive_seed(run_seed, "refit"))
                err = validation_error(model, validation)
            except (SolverError, ValueError) as exc:
                out.append(BenchFailure(task=train.name, method=method.name,
                                        error=str(exc)))
                continue
            out.append(
                BenchRecord(
                    task=train.name,
                    method=method.name,
                    gamma=gamma,
                    validation_error=err,
                    quality=quality_from_error(err),
                    wall_time_sec=time.perf_counter() - started,
                )
            )
        return out

    if jobs <= 1:
        per_task = [run_task(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_task = list(pool.map(run_task, tasks))

    records: list[BenchRecord] = []
    failures: list[BenchFailure] = []
    for results in per_task:
        for r in results:
            (records if isinstance(r, BenchRecord) else failures).append(r)

    q = np.full((len(methods), len(tasks)), QUALITY_FLOOR)
    index = {(r.task, r.method): r.quality for r in records}
    for i, m in enumerate(names):
        for t, task in enumerate(task_names):
            q[i, t] = index.get((task, m), QUALITY_FLOOR)
    table = QualityTable(methods=tuple(names), tasks=tuple(task_names), q=q)
    curves = dolan_more_curves(table, default_beta_grid(table, beta_steps))

    echo = {
        "seed": seed,
        "nu": config.nu,
        "solver_tolerance": config.solver_tolerance,
        "sv_threshold": config.sv_threshold,
        "grid": None if grid is None else grid.values.tolist(),
        "grid_mode": "auto-per-task" if grid is None else "explicit",
        "mc_count": mc_count,
        "box_factor": box_factor,
        "beta_steps": beta_steps,
        "methods": names,
        "tasks": task_names,
        "quality_convention": (
            f"quality = 2 - validation_error, clamped to >= {QUALITY_FLOOR}"
        ),
    }
    return BenchmarkReport(
        records=tuple(records),
        failures=tuple(failures),
        table=table,
        curves=tuple(curves),
        config=echo,
    )


def report_to_json(report: BenchmarkReport, include_timings: bool = False) -> str:
    """Serialize a report; wall times are nulled unless requested, so the
    default output is byte-identical across runs."""
    payload = {
        "config": report.config,
        "records": [
            {
                "task": r.task,
                "method": r.method,
                "gamma": r.gamma,
                "validation_error": r.validation_error,
                "quality": r.quality,
                "wall_time_sec": r.wall_time_sec if include_timings else None,
            }
            for r in report.records
        ],
        "failures": [
            {"task": f.task, "method": f.method, "error": f.error}
            for f in report.failures
        ],
        "methods": list(report.table.methods),
        "tasks": list(report.table.tasks),
        "quality_table": report.table.q.tolist(),
        "dolan_more": [
            {
                "method": c.method,
                "beta": c.beta_grid.tolist(),
                "p": c.p.tolist(),
            }
            for c in report.curves
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def curves_to_csv(curves: Sequence[DolanMoreCurve], path: str | Path) -> None:
    """Profile plot data: columns method, beta, p."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "beta", "p"])
        for c in curves:
            for b, p in zip(c.beta_grid, c.p):
                writer.writerow([c.method, repr(float(b)), repr(float(p))])


def builtin_corpus_paths() -> list[Path]:
    """CSV files of the bundled multiclass corpus, sorted by name."""
    root = resources.files("svddsel").joinpath("data")
    return sorted(Path(str(root)).glob("*.csv"))


def corpus_tasks(
    sources: Sequence[LabeledDataset],
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    seed: int = 0,
    box_factor: float = 2.0,
    val_fraction: float = 0.3,
) -> list[tuple[Dataset, LabeledDataset]]:
    """One task per (source, class, contamination fraction).

    Task names follow ``<source>-c<class>-a<percent>``.
    """
    tasks = []
    for source in sources:
        for cls in sorted(set(source.labels.tolist())):
            for frac in fractions:
                pct = int(round(100 * frac))
                task_seed = derive_seed(seed, source.name, cls, pct)
                train, validation = make_one_class_task(
                    source,
                    target_class=cls,
                    anomaly_fraction=frac,
                    box_factor=box_factor,
                    val_fraction=val_fraction,
                    seed=task_seed,
                )
                name = f"{source.name}-c{cls}-a{pct}"
                train = replace(train, name=name)
                validation = LabeledDataset(
                    data=replace(validation.data, name=f"{name}-val"),
                    labels=validation.labels,
                )
                tasks.append((train, validation))
    return tasks


def load_corpus_dir(path: str | Path, label_column: str = "label") -> list[LabeledDataset]:
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise ValueError(f"no CSV files in corpus directory {path}")
    return [load_multiclass_csv(f, label_column) for f in files]
