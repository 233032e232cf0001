"""Large-sample (Laplace/BIC) comparison of nested models."""
from __future__ import annotations

import math
import warnings

import numpy as np

from ..core import LogBayesFactor, PairedDataset
from ..errors import DomainError
from .base import ModelComparator


def nested_bic_lnbf(max_loglik_h0, max_loglik_h1, dim_h0, dim_h1, n) -> LogBayesFactor:
    """Log Bayes factor from maximised log-likelihoods with the BIC penalty.

    ``(max_loglik_h1 - max_loglik_h0) - (dim_h1 - dim_h0) / 2 * ln n``.
    The O(1) remainder of the Laplace expansion is dropped, so the result is
    flagged ``approximate``.
    """
    if n < 2:
        raise DomainError(f"BIC comparison needs n >= 2, got {n}")
    gap = float(max_loglik_h1) - float(max_loglik_h0)
    if dim_h1 >= dim_h0 and gap < 0:
        warnings.warn(
            "H1 log-likelihood below H0 for nested models; check the fits",
            RuntimeWarning,
            stacklevel=2,
        )
    return LogBayesFactor(gap - 0.5 * (dim_h1 - dim_h0) * math.log(n), approximate=True)


def _gaussian_max_loglik(cov, n, d):
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise DomainError("sample covariance is singular")
    return -0.5 * n * (d * math.log(2 * math.pi) + logdet + d)


def fit_normal_nested(data: PairedDataset):
    """Maximum-likelihood fits of the two Gaussian models.

    H1: (x, y) jointly normal with free mean and full covariance.
    H0: x and y independent normals, i.e. block-diagonal covariance.

    Returns
    -------
    dict with keys ``loglik0``, ``loglik1``, ``dim0``, ``dim1`` and
    ``ihat`` (the plug-in mutual information, ``(loglik1 - loglik0) / n``).
    """
    n, dx, dy = data.n, data.dx, data.dy
    z = np.hstack([data.x, data.y])
    zc = z - z.mean(axis=0)
    cov = zc.T @ zc / n
    d = dx + dy
    ll1 = _gaussian_max_loglik(cov, n, d)
    ll0 = _gaussian_max_loglik(cov[:dx, :dx], n, dx) + _gaussian_max_loglik(
        cov[dx:, dx:], n, dy
    )
    dim1 = d + d * (d + 1) // 2
    dim0 = d + dx * (dx + 1) // 2 + dy * (dy + 1) // 2
    return {
        "loglik0": ll0,
        "loglik1": ll1,
        "dim0": dim0,
        "dim1": dim1,
        "ihat": (ll1 - ll0) / n,
    }


def nested_normal_comparator() -> ModelComparator:
    """BIC comparator for independence within a multivariate normal."""

    def evaluator(data):
        fit = fit_normal_nested(data)
        return nested_bic_lnbf(
            fit["loglik0"], fit["loglik1"], fit["dim0"], fit["dim1"], data.n
        )

    # dims depend on (dx, dy); the bivariate values are reported here
    return ModelComparator("nested-normal", 4, 5, True, evaluator, approximate=True)
