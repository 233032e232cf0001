"""Gamma margins joined by a Student-t copula, fitted by inference functions
for margins (IFM).

Both models share gamma margins.  H0 joins them with the independence
copula; H1 with a bivariate t copula of fixed degrees of freedom and free
correlation.  The margins are fitted first by maximum likelihood, then the
copula correlation on the pseudo-observations.  The comparison uses the
large-sample form ``N * Ihat - 1/2 ln N``, with ``Ihat`` the mean log copula
density at the pseudo-observations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from ..core import LogBayesFactor, PairedDataset
from ..errors import DomainError, FitError
from ..numerics import gammaln, maximize_scalar, student_t_quantile
from .base import ModelComparator

RHO_BOUND = 0.99
DEFAULT_NU = 5.0

# keeps t quantiles finite when a CDF value rounds to 0 or 1
_U_MIN = 1e-16
_U_MAX = 1.0 - 2.0**-53


@dataclass(frozen=True)
class GammaFit:
    shape: float
    rate: float
    iterations: int = 0

    @property
    def mean(self):
        return self.shape / self.rate

    def cdf(self, x):
        return special.gammainc(self.shape, self.rate * np.asarray(x, dtype=float))

    def loglik(self, x):
        x = np.asarray(x, dtype=float)
        return float(
            np.sum(
                self.shape * math.log(self.rate)
                - gammaln(self.shape)
                + (self.shape - 1) * np.log(x)
                - self.rate * x
            )
        )


@dataclass(frozen=True)
class CopulaFit:
    marginal_x: GammaFit
    marginal_y: GammaFit
    rho_hat: float
    nu: float
    ihat: float
    n: int
    at_boundary: bool = False

    def __post_init__(self):
        if not abs(self.rho_hat) < 1:
            raise DomainError("rho_hat must lie in (-1, 1)")


def fit_gamma(x, tol=1e-12, max_iter=100) -> GammaFit:
    """Maximum-likelihood (shape, rate) of a gamma sample.

    Newton iterations on ``ln a - digamma(a) = ln mean(x) - mean(ln x)``
    started from the method-of-moments shape; the rate follows as
    ``shape / mean(x)``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise DomainError("gamma fit needs at least two observations")
    if np.any(~(x > 0)):
        raise DomainError("gamma margins require strictly positive data")
    mean = float(np.mean(x))
    s = math.log(mean) - float(np.mean(np.log(x)))
    if not s > 0:
        raise FitError("sample has no spread; gamma MLE does not exist", {"s": s})
    var = float(np.var(x))
    a = mean * mean / var if var > 0 else 1.0
    for it in range(1, max_iter + 1):
        g = math.log(a) - special.digamma(a) - s
        dg = 1.0 / a - special.polygamma(1, a)
        step = g / dg
        new = a - step
        while new <= 0:
            step *= 0.5
            new = a - step
        converged = abs(new - a) <= tol * new
        a = new
        if converged:
            return GammaFit(a, a / mean, it)
    raise FitError(
        "gamma MLE did not converge",
        {"shape": a, "last_step": step, "iterations": max_iter, "s": s},
    )


def t_copula_logpdf(u, v, rho, nu=DEFAULT_NU):
    """Log density of the bivariate Student-t copula at ``(u, v)``."""
    s = student_t_quantile(np.clip(u, _U_MIN, _U_MAX), nu)
    w = student_t_quantile(np.clip(v, _U_MIN, _U_MAX), nu)
    return _t_copula_logpdf_scores(s, w, rho, nu)


def _t_copula_logpdf_scores(s, w, rho, nu):
    one_m = 1.0 - rho * rho
    log_joint = (
        gammaln(0.5 * (nu + 2))
        - gammaln(0.5 * nu)
        - math.log(nu * math.pi)
        - 0.5 * math.log(one_m)
        - 0.5 * (nu + 2) * np.log1p((s * s - 2 * rho * s * w + w * w) / (nu * one_m))
    )
    log_marg = gammaln(0.5 * (nu + 1)) - gammaln(0.5 * nu) - 0.5 * math.log(nu * math.pi)
    return (
        log_joint
        - 2 * log_marg
        + 0.5 * (nu + 1) * (np.log1p(s * s / nu) + np.log1p(w * w / nu))
    )


def t_copula_score(s, w, rho, nu):
    """Derivative in ``rho`` of the summed copula log density at t scores.

    With ``Q = s^2 - 2 rho s w + w^2`` and ``D = nu (1 - rho^2) + Q`` each
    sample contributes ``rho / (1 - rho^2) - (nu + 2) (rho Q - s w (1 - rho^2)) / ((1 - rho^2) D)``.
    """
    one_m = 1.0 - rho * rho
    q = s * s - 2 * rho * s * w + w * w
    d = nu * one_m + q
    return float(np.sum(rho / one_m - (nu + 2) * (rho * q - s * w * one_m) / (one_m * d)))


def _polish_rho(s, w, rho, nu, bound):
    """Refine a bracketed maximiser by solving score(rho) = 0.

    Function-value searches resolve the argmax only to about the square
    root of machine precision; the score root is accurate to ~1e-14.
    """
    for delta in (1e-6, 1e-4, 1e-2):
        lo, hi = max(rho - delta, -bound), min(rho + delta, bound)
        f_lo, f_hi = t_copula_score(s, w, lo, nu), t_copula_score(s, w, hi, nu)
        if f_lo > 0 > f_hi:
            return optimize.brentq(lambda r: t_copula_score(s, w, r, nu), lo, hi,
                                   xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return rho


def copula_ifm_fit(data: PairedDataset, nu: float = DEFAULT_NU) -> CopulaFit:
    """Two-stage IFM fit: gamma margins, then the t-copula correlation."""
    if data.dx != 1 or data.dy != 1:
        raise DomainError("copula model expects univariate x and y")
    if data.n < 5:
        raise DomainError(f"copula fit needs N >= 5, got {data.n}")
    x, y = data.x[:, 0], data.y[:, 0]
    gx = fit_gamma(x)
    gy = fit_gamma(y)
    u = np.clip(gx.cdf(x), _U_MIN, _U_MAX)
    v = np.clip(gy.cdf(y), _U_MIN, _U_MAX)
    s = student_t_quantile(u, nu)
    w = student_t_quantile(v, nu)

    def objective(rho):
        return float(np.sum(_t_copula_logpdf_scores(s, w, rho, nu)))

    rho_hat, best = maximize_scalar(objective, -RHO_BOUND, RHO_BOUND, tol=1e-9)
    at_boundary = abs(rho_hat) >= RHO_BOUND - 1e-6
    if not at_boundary:
        rho_hat = _polish_rho(s, w, rho_hat, nu, RHO_BOUND)
        best = objective(rho_hat)
    return CopulaFit(gx, gy, rho_hat, nu, best / data.n, data.n, at_boundary)


def copula_lnbf(fit: CopulaFit, n: int) -> LogBayesFactor:
    """``n * fit.ihat - 1/2 ln n`` (one extra parameter under H1)."""
    if n < 2:
        raise DomainError(f"copula comparison needs N >= 2, got {n}")
    return LogBayesFactor(n * fit.ihat - 0.5 * math.log(n), approximate=True)


def copula_comparator(nu: float = DEFAULT_NU) -> ModelComparator:
    def evaluator(data):
        return copula_lnbf(copula_ifm_fit(data, nu), data.n)

    return ModelComparator(
        "copula", 4, 5, True, evaluator, approximate=True, params={"nu": nu}
    )
