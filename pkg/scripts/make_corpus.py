#!/usr/bin/env python3
"""Regenerate the bundled multiclass corpus (src/svddsel/data/*.csv).

The corpus is built from public-domain UCI classification sets shipped with
scikit-learn (needed only to run this script, not by the package):

  * wine           178 x 13, 3 classes, kept whole
  * breast-cancer  subsampled to 100 rows per class (seeded), 30 features

Features are z-scored per column (constant columns left unscaled): the
kernel is isotropic, so wildly different feature scales would reduce every
distance to its largest-scale coordinate.  Classes need ~100 rows so the
derived one-class tasks keep a few anomalies in validation even at 5%
contamination.
"""

import csv
from pathlib import Path

import numpy as np
from sklearn.datasets import load_breast_cancer, load_wine

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "svddsel" / "data"
SUBSAMPLE_SEED = 20260809
ROWS_PER_CLASS = 100


def zscore(features: np.ndarray) -> np.ndarray:
    sd = features.std(axis=0)
    sd[sd == 0] = 1.0
    return (features - features.mean(axis=0)) / sd


def write_csv(name: str, features: np.ndarray, labels: np.ndarray) -> None:
    path = OUT_DIR / f"{name}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j + 1}" for j in range(features.shape[1])] + ["label"])
        for row, label in zip(features, labels):
            writer.writerow([repr(float(x)) for x in row] + [int(label)])
    print(f"wrote {path} ({features.shape[0]} rows, {features.shape[1]} features)")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    wine = load_wine()
    write_csv("wine", zscore(wine.data), wine.target)

    bc = load_breast_cancer()
    rng = np.random.Generator(np.random.Philox(key=SUBSAMPLE_SEED))
    keep: list[int] = []
    for cls in sorted(set(bc.target.tolist())):
        idx = np.flatnonzero(bc.target == cls)
        keep.extend(rng.choice(idx, size=ROWS_PER_CLASS, replace=False).tolist())
    keep = sorted(keep)
    write_csv("breast-cancer", zscore(bc.data)[keep], bc.target[keep])


if __name__ == "__main__":
    main()
