"""Measure family of Bayesian dependence and its paired-data container.

The dependence between two systems observed in a dataset D is summarised by
the posterior log odds of a dependence model H1 against an independence
model H0::

    lnr = ln p(H1)/p(H0) + ln p(D|H1)/p(D|H0)

Every other member of the family (posterior probability, odds, Bayes factor,
base-10 log odds) is a strictly increasing function of ``lnr``.  All values
are stored in log space; the probability and odds views are materialised on
request only, so evidence far beyond the float range (|lnr| > 700) stays
representable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import DomainError

__all__ = [
    "VIEWS",
    "PairedDataset",
    "PriorOdds",
    "LogBayesFactor",
    "DependenceMeasure",
    "combine",
    "to_view",
]

VIEWS = ("pr", "r", "bf", "lnr", "logr")

LN10 = math.log(10.0)


def _as_2d(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim == 0:
        raise DomainError(f"{name} must be a sequence, got a scalar")
    elif arr.ndim != 2:
        raise DomainError(f"{name} must be 1-D or 2-D, got {arr.ndim}-D")
    if arr.shape[1] < 1:
        raise DomainError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PairedDataset:
    """N i.i.d. paired observations ``(x_n, y_n)``.

    Parameters
    ----------
    x, y : array_like
        Shape ``(N,)`` or ``(N, d)``.  One-dimensional input is promoted to a
        single column.  Both sides must have the same number of rows.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_2d(self.x, "x")
        y = _as_2d(self.y, "y")
        if x.shape[0] != y.shape[0]:
            raise DomainError(
                f"x and y must have the same length, got {x.shape[0]} and {y.shape[0]}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dx(self) -> int:
        return self.x.shape[1]

    @property
    def dy(self) -> int:
        return self.y.shape[1]

    def swap(self) -> "PairedDataset":
        """Return the dataset with the roles of x and y exchanged."""
        return PairedDataset(self.y, self.x)

    def head(self, n: int) -> "PairedDataset":
        return PairedDataset(self.x[:n], self.y[:n])

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PairedDataset):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    __hash__ = None


def _check_not_nan(value, name):
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{name} must not be NaN")
    return value


@dataclass(frozen=True)
class PriorOdds:
    """Prior log odds ``ln p(H1)/p(H0)``; 0 means equal prior probabilities."""

    log_odds: float = 0.0

    def __post_init__(self):
        value = _check_not_nan(self.log_odds, "log_odds")
        if math.isinf(value):
            raise DomainError("both prior probabilities must be strictly positive")
        object.__setattr__(self, "log_odds", value)

    @classmethod
    def from_probability(cls, p_h1: float) -> "PriorOdds":
        if not 0.0 < p_h1 < 1.0:
            raise DomainError(f"p(H1) must lie in (0, 1), got {p_h1}")
        return cls(math.log(p_h1) - math.log1p(-p_h1))


@dataclass(frozen=True)
class LogBayesFactor:
    """Natural-log Bayes factor ``ln p(D|H1)/p(D|H0)``.

    ``approximate`` is set when the value comes from an asymptotic formula
    whose O(1) remainder has been dropped.
    """

    value: float
    approximate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value", _check_not_nan(self.value, "value"))


@dataclass(frozen=True)
class DependenceMeasure:
    """Posterior log odds together with the prior it was built from."""

    lnr: float
    prior: PriorOdds = field(default_factory=PriorOdds)
    approximate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lnr", _check_not_nan(self.lnr, "lnr"))

    @property
    def pr(self) -> float:
        """Posterior probability of H1."""
        return float(expit(self.lnr))

    @property
    def r(self) -> float:
        """Posterior odds; overflows to ``inf`` beyond lnr ~ 709."""
        with np.errstate(over="ignore"):
            return float(np.exp(self.lnr))

    @property
    def lnbf(self) -> float:
        return self.lnr - self.prior.log_odds

    @property
    def bf(self) -> float:
        """Bayes factor, i.e. the odds without the prior term."""
        with np.errstate(over="ignore"):
            return float(np.exp(self.lnbf))

    @property
    def logr(self) -> float:
        return self.lnr / LN10

    def views(self) -> dict:
        return {name: to_view(self, name) for name in VIEWS}


def combine(prior: PriorOdds, bf: LogBayesFactor) -> DependenceMeasure:
    """Bayes-update prior odds with a log Bayes factor."""
    return DependenceMeasure(prior.log_odds + bf.value, prior, bf.approximate)


def to_view(m: DependenceMeasure, view: str) -> float:
    """Return one member of the measure family.

    Parameters
    ----------
    m : DependenceMeasure
    view : {'pr', 'r', 'bf', 'lnr', 'logr'}
    """
    if view not in VIEWS:
        raise DomainError(f"unknown view {view!r}; expected one of {VIEWS}")
    return float(getattr(m, view))
