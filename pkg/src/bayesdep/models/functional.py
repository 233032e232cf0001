"""Linear functional link observed through noise.

H1: (X, Y) = (T, T) + (E, F), T ~ N(0, tau2).
H0: (X, Y) = (U, V) + (E, F), U, V ~ N(0, tau2) independent.
E, F ~ N(0, sigma2) white noise; tau2 and sigma2 known.  The latent
variables integrate out in closed form.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import LogBayesFactor, PairedDataset
from ..errors import DomainError
from .base import ModelComparator


def functional_lnbf(data: PairedDataset, tau2: float, sigma2: float) -> LogBayesFactor:
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be > 0, got {sigma2}")
    if not tau2 > 0:
        raise DomainError(f"tau2 must be > 0, got {tau2}")
    if data.dx != 1 or data.dy != 1:
        raise DomainError("functional model expects univariate x and y")
    n = data.n
    if n == 0:
        return LogBayesFactor(0.0)
    x, y = data.x[:, 0], data.y[:, 0]
    alpha2 = sigma2 / tau2
    diff2 = np.sum((x - y) ** 2)
    sq = np.sum(x * x + y * y)
    value = (
        -0.5 * n * math.log(sigma2)
        - 0.5 * n * math.log(sigma2 + 2 * tau2)
        + n * math.log(sigma2 + tau2)
        - diff2 / (2 * sigma2 * (2 + alpha2))
        - sq / (2 * tau2 * (2 + alpha2))
        + sq / (2 * tau2 * (1 + alpha2))
    )
    return LogBayesFactor(float(value))


def functional_comparator(tau2=1.0, sigma2=1.0) -> ModelComparator:
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be > 0, got {sigma2}")

    def evaluator(data):
        return functional_lnbf(data, tau2, sigma2)

    return ModelComparator(
        "functional", 0, 0, True, evaluator, params={"tau2": tau2, "sigma2": sigma2}
    )
