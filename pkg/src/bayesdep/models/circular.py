"""Phase consistency across trials as evidence for a von Mises model.

H0: phases uniform on the circle.  H1: von Mises with unknown mean direction
(uniform prior) and concentration kappa with prior density
``kappa (1 + kappa^2)^(-3/2)``.  After integrating the mean direction out,
the Bayes factor only depends on the sample size N and the mean resultant
length R:

    BF = int_0^inf kappa I0(N R kappa) / ((1 + kappa^2)^(3/2) I0(kappa)^N) dkappa
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import DependenceMeasure, LogBayesFactor, PriorOdds, combine
from ..errors import DomainError
from ..numerics import QuadratureSpec, integrate, log_bessel_i0e
from .base import ModelComparator

TWO_PI = 2.0 * math.pi


def mean_resultant_length(theta) -> float:
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return 0.0
    c = np.mean(np.cos(theta))
    s = np.mean(np.sin(theta))
    return float(min(math.hypot(c, s), 1.0))


@dataclass(frozen=True, eq=False)
class PhaseSample:
    """Angles in radians, wrapped to [0, 2 pi)."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).ravel()
        if not np.all(np.isfinite(theta)):
            raise DomainError("phases must be finite")
        theta = np.mod(theta, TWO_PI)
        # mod can round up to exactly 2 pi for tiny negative inputs
        theta[theta >= TWO_PI] = 0.0
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "_rbar", mean_resultant_length(theta))

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def rbar(self) -> float:
        return self._rbar

    def __len__(self):
        return self.n


def _kappa_guess(rbar):
    # standard approximation to the inverse of A(kappa) = I1/I0
    if rbar < 0.53:
        return 2 * rbar + rbar**3 + 5 * rbar**5 / 6
    if rbar < 0.85:
        return -0.4 + 1.39 * rbar + 0.43 / (1 - rbar)
    # rbar^3 - 4 rbar^2 + 3 rbar, factored so it stays positive below 1
    return min(1e6, 1 / (rbar * (1 - rbar) * (3 - rbar))) if rbar < 1 else 1e6


def vonmises_log_bf(n: int, rbar: float, quadrature: QuadratureSpec | None = None) -> LogBayesFactor:
    """Natural-log Bayes factor of von Mises vs uniform from ``(N, R)``."""
    if n < 1:
        raise DomainError(f"need at least one phase, got N={n}")
    if not 0.0 <= rbar <= 1.0:
        raise DomainError(f"mean resultant length must lie in [0, 1], got {rbar}")
    nr = n * rbar
    if rbar == 1.0 and n >= 3:
        # all phases identical: the integrand decays only like
        # kappa^((N - 5) / 2), so the H1 marginal diverges
        return LogBayesFactor(math.inf)

    def log_integrand(k):
        # exponentially scaled Bessel terms: the e^(N R k) / e^(N k) parts
        # combine exactly into -N (1 - R) k
        with np.errstate(divide="ignore"):
            logk = np.log(k)
            return (
                logk
                - 1.5 * np.logaddexp(0.0, 2.0 * logk)
                - n * (1.0 - rbar) * k
                + log_bessel_i0e(nr * k)
                - n * log_bessel_i0e(k)
            )

    peak = _kappa_guess(rbar)
    split = max(1.0, min(2.0 * peak, 1e5))
    points = [p for p in (0.5 * peak, peak, 1.0) if 0 < p < split]
    head, _ = integrate(log_integrand, 0.0, split, quadrature, points=points)

    # kappa = split / u^2 on (0, 1] turns an algebraic kappa^(-3/2) tail
    # (N = 2, R = 1) into a bounded integrand; exponential tails go flat
    log_jac = math.log(2.0 * split)

    def log_tail(u):
        u = np.asarray(u, dtype=float)
        out = np.full(u.shape, -np.inf)
        with np.errstate(over="ignore", divide="ignore"):
            k = split / (u * u)
        ok = np.isfinite(k)
        out[ok] = log_integrand(k[ok]) + log_jac - 3.0 * np.log(u[ok])
        return out

    tail, _ = integrate(log_tail, 0.0, 1.0, quadrature)
    value = float(np.logaddexp(head, tail))
    return LogBayesFactor(value)


def vonmises_logr_from_stats(n, rbar, prior: PriorOdds | None = None,
                             quadrature: QuadratureSpec | None = None) -> DependenceMeasure:
    return combine(prior or PriorOdds(), vonmises_log_bf(n, rbar, quadrature))


def vonmises_logr(sample: PhaseSample, prior: PriorOdds | None = None,
                  quadrature: QuadratureSpec | None = None) -> DependenceMeasure:
    """Dependence measure for a phase sample; read ``.logr`` for log10 odds."""
    return vonmises_logr_from_stats(sample.n, sample.rbar, prior, quadrature)


def n0_curve(rbar, n_grid, prior: PriorOdds | None = None,
             quadrature: QuadratureSpec | None = None):
    """Sample size minimising the log10 odds at fixed ``rbar``.

    Returns
    -------
    n0 : int
        Grid argmin (smallest N on ties).
    values : list of float
        log10 odds for every N in ``n_grid``.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise DomainError("n_grid must not be empty")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise DomainError("n_grid must be sorted in increasing order")
    values = [vonmises_logr_from_stats(n, rbar, prior, quadrature).logr for n in n_grid]
    k = int(np.argmin(values))
    return n_grid[k], values


def vonmises_comparator(quadrature: QuadratureSpec | None = None) -> ModelComparator:
    def evaluator(sample):
        return vonmises_log_bf(sample.n, sample.rbar, quadrature)

    return ModelComparator("vonmises", 0, 2, False, evaluator)
