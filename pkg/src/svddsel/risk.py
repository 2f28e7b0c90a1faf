"""Model-selection risk functions and the validation error.

Five bandwidth-selection criteria are provided; two of them (kernel statistic
and polarization) score the kernel matrix directly and never fit a model.
All indicator sums follow the tie rule of the decision function: a decision
value of exactly zero counts as normal.

Degenerate kernel statistics return ``math.inf`` as a sentinel instead of
raising, so bandwidth sweeps can proceed through extreme gamma values.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .dataset import Dataset, LabeledDataset
from .kernel import GramMatrix, check_gamma, gram_matrix
from .sampling import AnomalySampler, mc_anomaly_acceptance
from .svdd import SvddModel, decision_values

# Variances below this are treated as exactly degenerate.
VARIANCE_FLOOR = 1e-300

RISK_SENTINEL = math.inf


class RiskKind(enum.Enum):
    SV = "sv"
    EMPIRICAL = "empirical"
    SMOTE = "smote"
    KERNEL = "kernel"
    POLARIZATION = "polarization"

    @classmethod
    def from_name(cls, name: str) -> "RiskKind":
        for kind in cls:
            if kind.value == name.lower():
                return kind
        raise ValueError(f"unknown risk kind {name!r}; expected one of "
                         f"{[k.value for k in cls]}")


def _check_nu_open(nu: float) -> float:
    nu = float(nu)
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must be in (0, 1) for this risk, got {nu}")
    return nu


def risk_sv(sv_fraction: float, nu: float) -> float:
    """Squared gap between the support-vector fraction and its target nu."""
    if not 0.0 <= sv_fraction <= 1.0 or not 0.0 <= nu <= 1.0:
        raise ValueError("sv_fraction and nu must lie in [0, 1]")
    return (nu - sv_fraction) ** 2


def risk_empirical(
    model: SvddModel, train: Dataset, nu: float, sampler: AnomalySampler
) -> float:
    """Training rejection rate plus Monte-Carlo anomaly acceptance.

    value = (1 / ((1 - nu) l)) * #{train points predicted -1}
          + (1 / nu) * acceptance-rate-under-the-anomaly-law
    """
    nu = _check_nu_open(nu)
    rejected = int(np.sum(decision_values(model, train.points) < 0.0))
    first = rejected / ((1.0 - nu) * train.l)
    second = mc_anomaly_acceptance(model, sampler) / nu
    return first + second


def risk_smote(
    model: SvddModel, synthetic: Dataset, nu: float, sampler: AnomalySampler
) -> float:
    """Empirical risk with the training term replaced by synthetic normals.

    The second term is computed exactly as in :func:`risk_empirical`; with the
    same sampler the two risks share it bit for bit.
    """
    nu = _check_nu_open(nu)
    rejected = int(np.sum(decision_values(model, synthetic.points) < 0.0))
    first = rejected / ((1.0 - nu) * synthetic.l)
    second = mc_anomaly_acceptance(model, sampler) / nu
    return first + second


def risk_kernel(gram: GramMatrix) -> float:
    """Mean of the off-diagonal kernel entries over their variance.

    Both statistics run over the l(l-1)/2 strictly-upper-triangle entries;
    the variance is the population variance.  Returns the infinity sentinel
    when the variance degenerates (all pairwise kernel values equal).
    """
    if gram.l < 3:
        raise ValueError(f"kernel risk needs l >= 3, got l = {gram.l}")
    ut = gram.upper_triangle()
    k_bar = float(np.mean(ut))
    s2 = float(np.mean((ut - k_bar) ** 2))
    if s2 < VARIANCE_FLOOR:
        return RISK_SENTINEL
    return k_bar / s2


def risk_polarization(train: Dataset, sampler: AnomalySampler, gamma: float) -> float:
    """Negative alignment between the kernel matrix and a normal/anomaly labeling.

    The 2l evaluation points are the l training points (labeled +1) followed
    by l sampled anomalies (labeled -1); the value is -sum_ij y_i K_ij y_j
    over all pairs including i = j.
    """
    gamma = check_gamma(gamma)
    if sampler.count != train.l:
        raise ValueError(
            f"polarization needs exactly l = {train.l} anomalies, "
            f"sampler draws {sampler.count}"
        )
    if sampler.box.n != train.n:
        raise ValueError(
            f"dimension mismatch: sampler box is {sampler.box.n}-d, data is {train.n}-d"
        )
    anomalies = sampler.sample()
    combined = Dataset(
        points=np.vstack([train.points, anomalies]), name=f"{train.name}-polarization"
    )
    y = np.concatenate([np.ones(train.l), -np.ones(train.l)])
    k = gram_matrix(combined, gamma).values
    return float(-(y @ k @ y))


def validation_error(model: SvddModel, validation: LabeledDataset) -> float:
    """Sum of the two class-conditional error rates on a labeled holdout set.

    value = (normals rejected) / s + (anomalies accepted) / m, in [0, 2].
    """
    validation.check_validation()
    dv = decision_values(model, validation.points)
    normals = validation.labels == 1
    anomalies = validation.labels == -1
    false_reject = float(np.mean(dv[normals] < 0.0))
    false_accept = float(np.mean(dv[anomalies] >= 0.0))
    return false_reject + false_accept
