"""Bivariate normal signal observed through additive white noise.

The latent pair (X, Y) is zero-mean normal with covariance tau2 * M(rho),
``M(rho) = [[1, rho], [rho, 1]]``, and only (U, V) = (X, Y) + (E, F) is
observed, E and F being independent N(0, sigma2).  tau2 and sigma2 are
known.  H0 pins rho = 0; H1 puts the prior q_eps on rho, uniform on
[-1, -eps] U [eps, 1].

Since (U, V) is normal with covariance ``sigma2 I + tau2 M(rho)``, the
marginal likelihood under H1 is a one-dimensional integral over rho of a
Gaussian likelihood that depends on the data only through the scatter
matrix ``S = sum_n z_n z_n^T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import LogBayesFactor, PairedDataset
from ..errors import DomainError
from ..numerics import QuadratureSpec, integrate, log_sum_exp
from .base import ModelComparator

LOG_2PI = math.log(2 * math.pi)


@dataclass(frozen=True)
class NoisyNormalParams:
    tau2: float = 1.0
    sigma2: float = 0.0
    eps: float = 0.0
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if not self.tau2 > 0:
            raise DomainError(f"tau2 must be > 0, got {self.tau2}")
        if not self.sigma2 >= 0:
            raise DomainError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not 0 <= self.eps < 1:
            raise DomainError(f"eps must lie in [0, 1), got {self.eps}")


@dataclass(frozen=True)
class ScatterMatrix:
    """``S = sum_n z_n z_n^T`` for z_n = (u_n, v_n), with its sample count."""

    s: np.ndarray
    n: int

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        if s.shape != (2, 2) or not np.allclose(s, s.T, rtol=0, atol=0):
            raise DomainError("scatter matrix must be a symmetric 2x2 matrix")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @classmethod
    def from_data(cls, data: PairedDataset) -> "ScatterMatrix":
        if data.dx != 1 or data.dy != 1:
            raise DomainError("noisy-normal model expects univariate x and y")
        u, v = data.x[:, 0], data.y[:, 0]
        suv = float(u @ v)
        return cls(np.array([[u @ u, suv], [suv, v @ v]]), data.n)

    @property
    def trace(self) -> float:
        return float(self.s[0, 0] + self.s[1, 1])


def log_lik_h0(scatter: ScatterMatrix, tau2, sigma2) -> float:
    a = sigma2 + tau2
    n = scatter.n
    return -n * LOG_2PI - n * math.log(a) - scatter.trace / (2 * a)


def log_lik_h1(rho, scatter: ScatterMatrix, tau2, sigma2):
    """Gaussian log-likelihood of the data at correlation ``rho`` (vectorised)."""
    rho = np.asarray(rho, dtype=float)
    a = sigma2 + tau2
    b = tau2 * rho
    with np.errstate(divide="ignore"):
        # (a - b)(a + b) keeps the determinant accurate near |rho| = 1
        det = (a - b) * (a + b)
        quad = (a * scatter.trace - 2.0 * b * scatter.s[0, 1]) / det
        out = -scatter.n * LOG_2PI - 0.5 * scatter.n * np.log(det) - 0.5 * quad
    # det -> 0 with a non-degenerate sample: likelihood -> 0
    return np.where(det > 0, out, -np.inf)


def _peak_guess(scatter, tau2, sigma2):
    if scatter.n == 0 or scatter.trace == 0:
        return 0.0
    # moment estimate of rho for the latent signal
    r = 2.0 * scatter.s[0, 1] / scatter.trace * (sigma2 + tau2) / tau2
    return float(np.clip(r, -0.999, 0.999))


def noisy_normal_log_evidence(scatter: ScatterMatrix, params: NoisyNormalParams):
    """``(ln p(D|H1), ln p(D|H0))`` for a scatter matrix."""
    tau2, sigma2, eps = params.tau2, params.sigma2, params.eps
    ll0 = log_lik_h0(scatter, tau2, sigma2)
    log_prior = -math.log(2.0 * (1.0 - eps))

    # integrate the ratio to H0 so the integrand stays of moderate size
    def log_integrand(rho):
        return log_lik_h1(rho, scatter, tau2, sigma2) - ll0 + log_prior

    peak = _peak_guess(scatter, tau2, sigma2)
    width = 1.0 / math.sqrt(max(scatter.n, 1))
    points = [peak - width, peak, peak + width]
    pieces = []
    for lo, hi in ((-1.0, -eps), (eps, 1.0)) if eps > 0 else ((-1.0, 1.0),):
        value, _ = integrate(log_integrand, lo, hi, params.quadrature, points=points)
        pieces.append(value)
    return log_sum_exp(pieces) + ll0, ll0


def noisy_normal_lnbf(data: PairedDataset, params: NoisyNormalParams) -> LogBayesFactor:
    """Exact log Bayes factor of the noisy bivariate normal model.

    ``sigma2 = 0`` gives the noiseless bivariate normal.  Raises
    :class:`~bayesdep.errors.AccuracyError` if the rho-integral does not
    converge (e.g. perfectly collinear data without noise).
    """
    if data.n == 0:
        return LogBayesFactor(0.0)
    scatter = ScatterMatrix.from_data(data)
    ll1, ll0 = noisy_normal_log_evidence(scatter, params)
    return LogBayesFactor(ll1 - ll0)


def noisy_normal_comparator(tau2=1.0, sigma2=0.0, eps=0.0, quadrature=None) -> ModelComparator:
    params = NoisyNormalParams(tau2, sigma2, eps, quadrature or QuadratureSpec())

    def evaluator(data):
        return noisy_normal_lnbf(data, params)

    return ModelComparator(
        "noisy-normal",
        0,
        1,
        True,
        evaluator,
        params={"tau2": tau2, "sigma2": sigma2, "eps": eps},
    )
