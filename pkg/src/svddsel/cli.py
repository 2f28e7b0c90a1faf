"""Command-line interface.

Subcommands: generate, sweep, select, fit, benchmark.  Every run writes the
fully resolved configuration (defaults and seeds included) into its output
artifact: JSON outputs embed it under "config"; CSV outputs get a sidecar
``<name>.meta.json``.  All outputs are byte-identical across reruns with the
same flags and any ``--jobs`` value (timings are opt-in via ``--timings``
because they cannot be reproducible).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, dataset, select, svdd
from .risk import RiskKind
from .rng import derive_seed
from .sampling import SmoteConfig
from .select import GammaGrid, PlateauSpec, SelectionRule
from .svdd import SvddConfig

SCENARIO_MIXTURE = "gaussian-mixture"


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _meta_path(out: Path) -> Path:
    return out.with_name(out.name + ".meta.json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svddsel",
        description="One-class ball classifier with automatic kernel bandwidth selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write synthetic train/validation CSVs")
    gen.add_argument("--scenario", choices=[SCENARIO_MIXTURE], default=SCENARIO_MIXTURE)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--dim", type=int, default=5)
    gen.add_argument("--train-count", type=int, default=100)
    gen.add_argument("--anomaly-count", type=int, default=100)
    gen.add_argument("--val-normals", type=int, default=5000)
    gen.add_argument("--val-anomalies", type=int, default=5000)
    gen.add_argument("--box-half-width", type=float, default=5.0,
                     help="anomalies are uniform on [-w, w]^dim")

    sweep = sub.add_parser("sweep", help="risk curve over a bandwidth grid")
    sweep.add_argument("--train", required=True, help="training CSV (one-class)")
    sweep.add_argument("--label-column", default=None,
                       help="if set, keep only rows labeled +1 for training")
    sweep.add_argument("--risk", required=True,
                       choices=[k.value for k in RiskKind])
    sweep.add_argument("--nu", type=float, default=0.1)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--gamma-min", type=float, default=None)
    sweep.add_argument("--gamma-max", type=float, default=None)
    sweep.add_argument("--gamma-steps", type=int, default=select.DEFAULT_GRID_STEPS)
    sweep.add_argument("--mc-count", type=int, default=None)
    sweep.add_argument("--box-factor", type=float, default=2.0)
    sweep.add_argument("--smote-k", type=int, default=5)
    sweep.add_argument("--smote-multiplier", type=float, default=1.0)
    sweep.add_argument("--tolerance", type=float, default=1e-6)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--out", required=True, help="curve CSV path")

    sel = sub.add_parser("select", help="pick a bandwidth from a risk curve")
    sel.add_argument("--curve", required=True, help="curve CSV from `sweep`")
    sel.add_argument("--rule", choices=[r.value for r in SelectionRule],
                     default=SelectionRule.PLATEAU_MAX.value)
    sel.add_argument("--rel-tol", type=float, default=0.05)
    sel.add_argument("--out", default=None, help="also write the JSON here")

    fit_p = sub.add_parser("fit", help="fit a model at a fixed bandwidth")
    fit_p.add_argument("--train", required=True)
    fit_p.add_argument("--label-column", default=None)
    fit_p.add_argument("--gamma", type=float, required=True)
    fit_p.add_argument("--nu", type=float, default=0.1)
    fit_p.add_argument("--seed", type=int, default=0)
    fit_p.add_argument("--tolerance", type=float, default=1e-6)
    fit_p.add_argument("--max-passes", type=int, default=None)
    fit_p.add_argument("--out", required=True, help="model JSON path")

    bm = sub.add_parser("benchmark", help="compare selection methods over a corpus")
    bm.add_argument("--corpus", default="builtin",
                    help="'builtin' or a directory of multiclass CSVs")
    bm.add_argument("--label-column", default="label")
    bm.add_argument("--fractions", default="0.05,0.10,0.15",
                    help="comma-separated contamination fractions")
    bm.add_argument("--risks", default="sv,empirical,smote,kernel,polarization")
    bm.add_argument("--rule", choices=["default", "argmin", "plateau-max"],
                    default="default",
                    help="'default' = argmin for the sv risk, plateau-max otherwise")
    bm.add_argument("--rel-tol", type=float, default=0.05)
    bm.add_argument("--nu", type=float, default=0.1)
    bm.add_argument("--seed", type=int, default=0)
    bm.add_argument("--gamma-steps", type=int, default=select.DEFAULT_GRID_STEPS)
    bm.add_argument("--mc-count", type=int, default=None)
    bm.add_argument("--box-factor", type=float, default=2.0)
    bm.add_argument("--val-fraction", type=float, default=0.3)
    bm.add_argument("--tolerance", type=float, default=1e-6)
    bm.add_argument("--jobs", type=int, default=1)
    bm.add_argument("--timings", action="store_true",
                    help="record wall times in the report (not reproducible)")
    bm.add_argument("--out-report", required=True)
    bm.add_argument("--out-curves", required=True)
    return parser


def _load_train(path: str, label_column: str | None) -> dataset.Dataset:
    labeled = dataset.load_csv(path, label_column)
    if label_column is None:
        return labeled.data
    keep = labeled.labels == 1
    if not np.any(keep):
        raise ValueError(f"{path}: no rows labeled +1 to train on")
    return dataset.Dataset(points=labeled.points[keep], name=labeled.name)


def _cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dim = args.dim
    w = args.box_half_width
    means = [[1.0] * dim, [-1.0] * dim]
    box = dataset.BoundingBox(lo=np.full(dim, -w), hi=np.full(dim, w))

    train = dataset.gen_gaussian_mixture(
        derive_seed(args.seed, "train"), args.train_count, means, name="train"
    )
    anomalies = dataset.gen_uniform(
        derive_seed(args.seed, "anomalies"), args.anomaly_count, box, name="anomalies"
    )
    val_normals = dataset.gen_gaussian_mixture(
        derive_seed(args.seed, "val-normals"), args.val_normals, means
    )
    val_anomalies = dataset.gen_uniform(
        derive_seed(args.seed, "val-anomalies"), args.val_anomalies, box
    )
    validation = dataset.LabeledDataset(
        data=dataset.Dataset(
            points=np.vstack([val_normals.points, val_anomalies.points]), name="val"
        ),
        labels=np.concatenate(
            [np.ones(args.val_normals, dtype=np.int64),
             -np.ones(args.val_anomalies, dtype=np.int64)]
        ),
    )

    dataset.save_csv(train, out / "train.csv")
    dataset.save_csv(anomalies, out / "anomalies.csv")
    dataset.save_csv(validation, out / "val.csv")
    _write_json(
        {
            "command": "generate",
            "config": {
                "scenario": args.scenario,
                "seed": args.seed,
                "dim": dim,
                "train_count": args.train_count,
                "anomaly_count": args.anomaly_count,
                "val_normals": args.val_normals,
                "val_anomalies": args.val_anomalies,
                "box_half_width": w,
                "mixture_means": means,
            },
            "outputs": ["train.csv", "anomalies.csv", "val.csv"],
        },
        out / "manifest.json",
    )
    print(f"wrote train.csv, anomalies.csv, val.csv, manifest.json to {out}")
    return 0


def _resolve_grid(args: argparse.Namespace, train: dataset.Dataset) -> GammaGrid:
    if (args.gamma_min is None) != (args.gamma_max is None):
        raise ValueError("--gamma-min and --gamma-max must be given together")
    if args.gamma_min is not None:
        return GammaGrid.log_spaced(args.gamma_min, args.gamma_max, args.gamma_steps)
    return GammaGrid.auto(train, steps=args.gamma_steps)


def _cmd_sweep(args: argparse.Namespace) -> int:
    train = _load_train(args.train, args.label_column)
    grid = _resolve_grid(args, train)
    kind = RiskKind.from_name(args.risk)
    config = SvddConfig(nu=args.nu, solver_tolerance=args.tolerance)
    smote_config = SmoteConfig(
        k_neighbors=args.smote_k,
        multiplier=args.smote_multiplier,
        seed=derive_seed(args.seed, "smote"),
    )
    curve = select.sweep_risk_curve(
        train,
        grid,
        config,
        kind,
        seed=args.seed,
        mc_count=args.mc_count,
        box_factor=args.box_factor,
        smote_config=smote_config,
        jobs=args.jobs,
    )
    out = Path(args.out)
    select.curve_to_csv(curve, out)
    _write_json(
        {
            "command": "sweep",
            "config": {
                "train": str(args.train),
                "label_column": args.label_column,
                "risk": kind.value,
                "nu": args.nu,
                "seed": args.seed,
                "resolved_grid": {
                    "gamma_min": float(grid.values[0]),
                    "gamma_max": float(grid.values[-1]),
                    "steps": len(grid),
                    "mode": "explicit" if args.gamma_min is not None else "auto",
                },
                "mc_count": args.mc_count,
                "box_factor": args.box_factor,
                "smote_k": args.smote_k,
                "smote_multiplier": args.smote_multiplier,
                "solver_tolerance": args.tolerance,
                "jobs": args.jobs,
            },
        },
        _meta_path(out),
    )
    print(f"wrote {out} and {_meta_path(out)}")
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    curve = select.curve_from_csv(args.curve)
    spec = PlateauSpec(rel_tol=args.rel_tol, rule=SelectionRule.from_name(args.rule))
    start, end = select.find_plateau(curve, spec)
    gamma = select.select_gamma(curve, spec)
    payload = {
        "command": "select",
        "config": {
            "curve": str(args.curve),
            "rule": spec.rule.value,
            "rel_tol": spec.rel_tol,
        },
        "kind": curve.kind,
        "nu": curve.nu,
        "selected_gamma": gamma,
        "plateau": {
            "start_index": start,
            "end_index": end,
            "gamma_lo": float(curve.gammas[start]),
            "gamma_hi": float(curve.gammas[end]),
        },
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    train = _load_train(args.train, args.label_column)
    config = SvddConfig(
        nu=args.nu, solver_tolerance=args.tolerance, max_passes=args.max_passes
    )
    model = svdd.fit(train, args.gamma, config, seed=args.seed)
    out = Path(args.out)
    svdd.save_model(model, out)
    _write_json(
        {
            "command": "fit",
            "config": {
                "train": str(args.train),
                "label_column": args.label_column,
                "gamma": args.gamma,
                "nu": args.nu,
                "seed": args.seed,
                "solver_tolerance": args.tolerance,
                "max_passes": args.max_passes,
            },
            "support_vectors": int(model.support_indices.shape[0]),
            "rho": model.rho,
            "radius_sq": model.radius_sq,
        },
        _meta_path(out),
    )
    print(f"wrote {out} and {_meta_path(out)}")
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    fractions = [float(f) for f in args.fractions.split(",") if f]
    if not fractions:
        raise ValueError("--fractions must name at least one value")
    kinds = [RiskKind.from_name(k) for k in args.risks.split(",") if k]
    if not kinds:
        raise ValueError("--risks must name at least one risk kind")

    if args.corpus == "builtin":
        paths = bench.builtin_corpus_paths()
        sources = [dataset.load_multiclass_csv(p, args.label_column) for p in paths]
    else:
        sources = bench.load_corpus_dir(args.corpus, args.label_column)

    tasks = bench.corpus_tasks(
        sources,
        fractions=fractions,
        seed=derive_seed(args.seed, "corpus"),
        box_factor=args.box_factor,
        val_fraction=args.val_fraction,
    )

    def plateau_for(kind: RiskKind) -> PlateauSpec:
        if args.rule == "default":
            return select.default_plateau_spec(kind, rel_tol=args.rel_tol)
        return PlateauSpec(rel_tol=args.rel_tol, rule=SelectionRule.from_name(args.rule))

    methods = [bench.MethodSpec(kind=k, plateau=plateau_for(k)) for k in kinds]
    config = SvddConfig(nu=args.nu, solver_tolerance=args.tolerance)
    report = bench.run_benchmark(
        tasks,
        methods,
        grid=None,
        config=config,
        seed=args.seed,
        mc_count=args.mc_count,
        box_factor=args.box_factor,
        grid_steps=args.gamma_steps,
        jobs=args.jobs,
    )
    report.config.update(
        {
            "corpus": args.corpus,
            "fractions": fractions,
            "val_fraction": args.val_fraction,
            "rule": args.rule,
            "rel_tol": args.rel_tol,
            "gamma_steps": args.gamma_steps,
            "jobs": args.jobs,
        }
    )
    Path(args.out_report).write_text(
        bench.report_to_json(report, include_timings=args.timings)
    )
    bench.curves_to_csv(report.curves, args.out_curves)
    print(
        f"{len(report.records)} records, {len(report.failures)} failures; "
        f"wrote {args.out_report} and {args.out_curves}"
    )
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "sweep": _cmd_sweep,
    "select": _cmd_select,
    "fit": _cmd_fit,
    "benchmark": _cmd_benchmark,
}


def run(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, svdd.SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
