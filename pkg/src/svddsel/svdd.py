"""Minimum-enclosing-ball one-class classifier, solved in dual form.

The primal problem (soft ball of radius R around the data in kernel feature
space, outlier budget nu) is solved through its standard dual:

    minimize    sum_ij alpha_i alpha_j K_ij  -  sum_i alpha_i K_ii
    subject to  sum_i alpha_i = 1,   0 <= alpha_i <= 1/(nu l).

With the Gaussian kernel K_ii = 1, so the dual minimizes the quadratic form
on the capped simplex.  The solver is a pairwise working-set method: each
step moves mass between the two coordinates that most violate the KKT
conditions, which preserves sum(alpha) = 1 exactly and needs no external QP
dependency.

Decision function: f(x) = sign(sum_i alpha_i K(x, X_i) - rho), ties counting
as normal (+1).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .kernel import check_gamma, cross_kernel, gram_matrix
from .rng import make_rng

# Refresh the incrementally-maintained gradient this often to bound float drift.
_GRAD_REFRESH = 1024

# Points whose decision value is within this band of zero sit on the ball
# surface up to solver precision (10x the default KKT tolerance); they are
# not outliers.  At an exact optimum, strictly-outside points have their
# weight at the cap and clear this band by far.
DECISION_BOUNDARY_TOL = 1e-5

_fit_lock = threading.Lock()
_fit_calls = 0


def fit_call_count() -> int:
    """Monotone counter of solver invocations (instrumentation for tests)."""
    return _fit_calls


class SolverError(RuntimeError):
    """Raised when the dual solver cannot reach the requested tolerance."""

    def __init__(self, message: str, best_violation: float):
        super().__init__(message)
        self.best_violation = best_violation


@dataclass(frozen=True)
class SvddConfig:
    """Solver parameters.

    ``max_passes`` is the iteration cap of the pairwise loop; ``None`` means
    10 * l * l.  ``sv_threshold`` is the weight above which a point counts as
    a support vector.
    """

    nu: float = 0.1
    solver_tolerance: float = 1e-6
    max_passes: int | None = None
    sv_threshold: float = 1e-8

    def __post_init__(self) -> None:
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must be in (0, 1], got {self.nu}")
        if self.solver_tolerance <= 0.0:
            raise ValueError("solver_tolerance must be positive")
        if self.sv_threshold <= 0.0:
            raise ValueError("sv_threshold must be positive")


@dataclass(frozen=True)
class SvddModel:
    """Fitted dual solution and everything needed to evaluate the decision function."""

    alphas: np.ndarray
    support_indices: np.ndarray
    rho: float
    radius_sq: float
    gamma: float
    nu: float
    train_points: Dataset
    offset_const: float  # alpha' K alpha over the training Gram

    def __post_init__(self) -> None:
        a = np.array(self.alphas, dtype=np.float64, copy=True)
        a.flags.writeable = False
        object.__setattr__(self, "alphas", a)
        s = np.array(self.support_indices, dtype=np.int64, copy=True)
        s.flags.writeable = False
        object.__setattr__(self, "support_indices", s)


def _pick(grad: np.ndarray, mask: np.ndarray, perm: np.ndarray, want_min: bool) -> int:
    idx = np.flatnonzero(mask)
    vals = grad[idx]
    target = vals.min() if want_min else vals.max()
    tied = idx[vals == target]
    if tied.shape[0] == 1:
        return int(tied[0])
    return int(tied[np.argmin(perm[tied])])


def fit(train: Dataset, gamma: float, config: SvddConfig, seed: int = 0) -> SvddModel:
    """Solve the dual on ``train`` at bandwidth ``gamma``.

    Deterministic given ``seed``; the seed only breaks ties between equally
    KKT-violating coordinates.  Raises :class:`SolverError` if the KKT gap
    does not reach ``config.solver_tolerance`` within the iteration cap, and
    ValueError when nu * l < 1 (the constraint set would be empty).
    """
    global _fit_calls
    with _fit_lock:
        _fit_calls += 1

    gamma = check_gamma(gamma)
    l = train.l
    if config.nu * l < 1.0:
        raise ValueError(f"nu * l must be >= 1, got nu={config.nu}, l={l}")
    cap = 1.0 / (config.nu * l)
    max_iter = config.max_passes if config.max_passes is not None else 10 * l * l

    k = gram_matrix(train, gamma).values
    diag = np.diag(k).copy()
    alpha = np.full(l, 1.0 / l)
    # ties are broken by this fixed random ranking of the coordinates
    perm = make_rng(seed).permutation(l)

    grad = 2.0 * (k @ alpha) - diag
    best_violation = np.inf
    converged = False
    for it in range(max_iter):
        can_up = alpha < cap
        can_dn = alpha > 0.0
        if not can_up.any():
            converged = True  # every weight at the cap: nu = 1 fixed point
            break
        i = _pick(grad, can_up, perm, want_min=True)
        j = _pick(grad, can_dn, perm, want_min=False)
        violation = grad[j] - grad[i]
        best_violation = min(best_violation, violation)
        if violation <= config.solver_tolerance:
            converged = True
            break

        curv = k[i, i] + k[j, j] - 2.0 * k[i, j]
        d_max = min(cap - alpha[i], alpha[j])
        if curv > 0.0:
            d = min(violation / (2.0 * curv), d_max)
        else:
            d = d_max  # coincident points: objective linear along the direction
        if d >= cap - alpha[i]:
            alpha[i] = cap
        else:
            alpha[i] += d
        if d >= alpha[j]:
            alpha[j] = 0.0
        else:
            alpha[j] -= d
        if (it + 1) % _GRAD_REFRESH == 0:
            grad = 2.0 * (k @ alpha) - diag
        else:
            grad += (2.0 * d) * (k[:, i] - k[:, j])
    if not converged:
        raise SolverError(
            f"no convergence within {max_iter} iterations "
            f"(best KKT violation {best_violation:.3e}, tolerance "
            f"{config.solver_tolerance:.3e})",
            best_violation=float(best_violation),
        )

    return _finish_model(train, gamma, config, alpha, k)


def _finish_model(
    train: Dataset,
    gamma: float,
    config: SvddConfig,
    alpha: np.ndarray,
    k: np.ndarray,
) -> SvddModel:
    l = train.l
    cap = 1.0 / (config.nu * l)
    thr = config.sv_threshold
    k_alpha = k @ alpha

    unbounded = (alpha > thr) & (alpha < cap - thr)
    if unbounded.any():
        rho = float(np.mean(k_alpha[unbounded]))
    else:
        # all weights at a bound: threshold between the capped (outside)
        # and the zero-weight (inside) groups
        capped = alpha >= cap - thr
        zeros = alpha <= thr
        hi = float(np.max(k_alpha[capped]))
        if zeros.any():
            rho = 0.5 * (hi + float(np.min(k_alpha[zeros])))
        else:
            rho = hi
    offset = float(np.dot(alpha, k_alpha))
    radius_sq = max(0.0, 1.0 - 2.0 * rho + offset)
    return SvddModel(
        alphas=alpha,
        support_indices=np.flatnonzero(alpha > thr),
        rho=rho,
        radius_sq=radius_sq,
        gamma=gamma,
        nu=config.nu,
        train_points=train,
        offset_const=offset,
    )


def dual_objective(model: SvddModel) -> float:
    """sum_i alpha_i K_ii - alpha' K alpha, the maximized dual value."""
    return float(np.sum(model.alphas)) - model.offset_const


def decision_values(model: SvddModel, points: np.ndarray) -> np.ndarray:
    """Decision function over rows of ``points``; >= 0 means inside the ball."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != model.train_points.n:
        raise ValueError(
            f"dimension mismatch: query has {pts.shape[1]} features, "
            f"model was trained on {model.train_points.n}"
        )
    return cross_kernel(pts, model.train_points.points, model.gamma) @ model.alphas - model.rho


def decision_value(model: SvddModel, x: np.ndarray) -> float:
    return float(decision_values(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def predict_many(model: SvddModel, points: np.ndarray) -> np.ndarray:
    """+1 (normal) where the decision value is >= 0, else -1 (anomaly)."""
    return np.where(decision_values(model, points) >= 0.0, 1, -1).astype(np.int64)


def predict(model: SvddModel, x: np.ndarray) -> int:
    return int(predict_many(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def model_stats(
    model: SvddModel, train: Dataset, boundary_tol: float = DECISION_BOUNDARY_TOL
) -> tuple[float, float]:
    """(support-vector fraction, training outlier fraction) of a fitted model.

    A point counts as an outlier when its decision value is below
    ``-boundary_tol``: on-surface support vectors hover within solver
    precision of zero and must not flip the count.
    """
    sv_fraction = model.support_indices.shape[0] / train.l
    outlier_fraction = float(
        np.mean(decision_values(model, train.points) < -boundary_tol)
    )
    return sv_fraction, outlier_fraction


def model_to_json(model: SvddModel) -> str:
    payload = {
        "gamma": model.gamma,
        "nu": model.nu,
        "rho": model.rho,
        "radius_sq": model.radius_sq,
        "alphas": model.alphas.tolist(),
        "support_indices": model.support_indices.tolist(),
        "train_points": model.train_points.points.tolist(),
    }
    return json.dumps(payload, indent=2) + "\n"


def model_from_json(text: str) -> SvddModel:
    payload = json.loads(text)
    train = Dataset(points=np.asarray(payload["train_points"], dtype=np.float64), name="train")
    alphas = np.asarray(payload["alphas"], dtype=np.float64)
    # offset_const is not serialized; recompute it the same way fit does
    k_alpha = gram_matrix(train, float(payload["gamma"])).values @ alphas
    offset = float(np.dot(alphas, k_alpha))
    return SvddModel(
        alphas=alphas,
        support_indices=np.asarray(payload["support_indices"], dtype=np.int64),
        rho=float(payload["rho"]),
        radius_sq=float(payload["radius_sq"]),
        gamma=float(payload["gamma"]),
        nu=float(payload["nu"]),
        train_points=train,
        offset_const=offset,
    )


def save_model(model: SvddModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model))


def load_model(path: str | Path) -> SvddModel:
    return model_from_json(Path(path).read_text())
