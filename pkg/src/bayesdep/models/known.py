"""Comparison of two fully specified distributions."""
from __future__ import annotations

import math

from ..core import LogBayesFactor, PairedDataset
from ..errors import DomainError, EvaluationError
from .base import ModelComparator


def known_dist_lnbf(data: PairedDataset, f1, f0x, f0y) -> LogBayesFactor:
    """Exact log Bayes factor when H0 and H1 have no free parameter.

    ``f1(x, y)``, ``f0x(x)`` and ``f0y(y)`` are log-densities evaluated on
    single samples (``x`` and ``y`` are 1-D arrays of length dx and dy).
    The result is ``sum_n ln f1(x_n, y_n) - ln f0x(x_n) - ln f0y(y_n)``.
    """
    total = 0.0
    for n in range(data.n):
        x, y = data.x[n], data.y[n]
        term = float(f1(x, y)) - float(f0x(x)) - float(f0y(y))
        if math.isnan(term):
            raise EvaluationError(f"log-density is NaN at sample index {n}")
        total += term
    return LogBayesFactor(total)


def known_normal_densities(rho: float, tau2: float = 1.0):
    """Log-densities ``(f1, f0x, f0y)`` of the bivariate normal pair.

    H1 is the zero-mean bivariate normal with covariance
    ``tau2 * [[1, rho], [rho, 1]]``; under H0 both coordinates are
    independent N(0, tau2).
    """
    if not -1.0 < rho < 1.0:
        raise DomainError("rho must lie in (-1, 1)")
    if not tau2 > 0:
        raise DomainError("tau2 must be > 0")
    det = tau2 * tau2 * (1.0 - rho * rho)

    def f1(x, y):
        u, v = x[0], y[0]
        q = tau2 * (u * u + v * v - 2.0 * rho * u * v) / det
        return -math.log(2 * math.pi) - 0.5 * math.log(det) - 0.5 * q

    def f0(z):
        return -0.5 * math.log(2 * math.pi * tau2) - 0.5 * z[0] * z[0] / tau2

    return f1, f0, f0


def known_normal_comparator(rho: float, tau2: float = 1.0) -> ModelComparator:
    f1, f0x, f0y = known_normal_densities(rho, tau2)

    def evaluator(data):
        if data.dx != 1 or data.dy != 1:
            raise DomainError("known-normal comparator expects univariate x and y")
        return known_dist_lnbf(data, f1, f0x, f0y)

    return ModelComparator(
        "known-normal", 0, 0, True, evaluator, params={"rho": rho, "tau2": tau2}
    )
