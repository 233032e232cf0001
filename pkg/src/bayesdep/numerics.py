"""Numerical kernels: log-space quadrature, special functions, scalar
optimisation and a fixed-step Runge-Kutta integrator.

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .errors import AccuracyError, DivergenceError, DomainError

__all__ = [
    "QuadratureSpec",
    "log_sum_exp",
    "log_bessel_i0",
    "composite_gauss_legendre",
    "integrate",
    "maximize_scalar",
    "student_t_cdf",
    "student_t_quantile",
    "gammaln",
    "digamma",
    "OdeState",
    "Trajectory",
    "rk4_integrate",
    "downsample",
]


# ---------------------------------------------------------------------------
# log-sum-exp
# ---------------------------------------------------------------------------

def log_sum_exp(terms) -> float:
    """ln(sum(exp(terms))) without overflow.

    >>> log_sum_exp([1000.0, 1000.0]) - 1000.0  # doctest: +ELLIPSIS
    0.6931471805599...
    """
    a = np.asarray(terms, dtype=float).ravel()
    if a.size == 0:
        raise DomainError("log_sum_exp of an empty sequence")
    if np.isnan(a).any():
        raise DomainError("log_sum_exp received NaN")
    m = a.max()
    if not np.isfinite(m):
        # all -inf gives -inf; any +inf gives +inf
        return float(m)
    return float(m + math.log(np.sum(np.exp(a - m))))


# ---------------------------------------------------------------------------
# Modified Bessel function I0 in log form
# ---------------------------------------------------------------------------

_BESSEL_SWITCH = 20.0
_SERIES_TERMS = 80
_ASYMPTOTIC_TERMS = 26


@lru_cache(maxsize=None)
def _asymptotic_coefficients():
    # I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    coef = [1.0]
    for k in range(1, _ASYMPTOTIC_TERMS):
        coef.append(coef[-1] * (2 * k - 1) ** 2 / (8.0 * k))
    return np.array(coef)


def log_bessel_i0(x):
    """Natural log of the modified Bessel function of the first kind, order 0.

    Uses the ascending power series below x = 20 and the Hankel asymptotic
    expansion above, so ``log_bessel_i0(1e5)`` is finite where ``I0`` itself
    overflows.  Accepts scalars or arrays.
    """
    out = log_bessel_i0e(x) + np.asarray(x, dtype=float)
    if np.ndim(out) == 0:
        return float(out)
    return out


def log_bessel_i0e(x):
    """``ln I0(x) - x``, free of the cancellation that subtracting ``x``
    from :func:`log_bessel_i0` would cause at large ``x``."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)) or np.any(xa < 0):
        raise DomainError("log_bessel_i0 requires finite x >= 0")
    out = np.empty_like(xa)
    small = xa <= _BESSEL_SWITCH

    if np.any(small):
        xs = xa[small]
        q = 0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        for k in range(1, _SERIES_TERMS):
            term = term * q / (k * k)
            total = total + term
        out[small] = np.log(total) - xs

    if np.any(~small):
        xl = xa[~small]
        coef = _asymptotic_coefficients()
        inv = 1.0 / xl
        # Horner evaluation of sum_k c_k x^-k
        acc = np.full_like(xl, coef[-1])
        for c in coef[-2::-1]:
            acc = acc * inv + c
        out[~small] = np.log(acc) - 0.5 * np.log(2.0 * np.pi * xl)

    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for :func:`integrate`.

    ``abs_tol`` bounds the absolute error of the *log* of the integral (that
    is, the relative error of the integral itself); ``rel_tol`` bounds that
    same error relative to ``|log integral|``.  Integration stops as soon as
    either bound holds.
    """

    method: str = "gauss-legendre-composite"
    abs_tol: float = 1e-11
    rel_tol: float = 1e-12
    max_subdivisions: int = 4000
    nodes_per_panel: int = 15

    def __post_init__(self):
        if self.method not in ("gauss-legendre-composite", "adaptive-simpson"):
            raise DomainError(f"unknown quadrature method {self.method!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.nodes_per_panel < 2:
            raise DomainError("nodes_per_panel must be >= 2")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


_SIMPSON = (np.array([-1.0, 0.0, 1.0]), np.array([1.0, 4.0, 1.0]) / 3.0)


def _reference_rule(spec):
    if spec.method == "adaptive-simpson":
        return _SIMPSON
    return _gauss_legendre(spec.nodes_per_panel)


def composite_gauss_legendre(f, a, b, panels, nodes):
    """Plain (linear-space, non-adaptive) composite Gauss-Legendre rule."""
    x, w = _gauss_legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts), dtype=float)
    return float(np.sum(half[:, None] * w[None, :] * vals))


def _log_abs_diff(la, lb):
    """ln|exp(la) - exp(lb)| for log-values (either may be -inf)."""
    hi, lo = max(la, lb), min(la, lb)
    if hi == -np.inf:
        return -np.inf
    if lo == hi:
        return -np.inf
    return hi + math.log(-math.expm1(lo - hi))


class _Panel:
    __slots__ = ("lo", "hi", "log_value", "log_err", "halves")

    def __init__(self, lo, hi, log_value, log_err, halves):
        self.lo = lo
        self.hi = hi
        self.log_value = log_value
        self.log_err = log_err
        self.halves = halves


_GRADE_RATIO = 8.0
_GRADE_LEVELS = 7


def integrate(log_f, a, b, spec: QuadratureSpec | None = None, points=()):
    """Integrate a positive function given through its logarithm.

    Parameters
    ----------
    log_f : callable
        Vectorised: maps an array of abscissae to ``ln f`` at those points.
        ``-inf`` is allowed (f = 0); NaN is not.
    a, b : float
        Integration limits with ``a < b``; ``b`` may be ``np.inf``, handled
        through the substitution ``x = a + t / (1 - t)``.
    spec : QuadratureSpec, optional
    points : sequence of float, optional
        Interior break points (for instance the location of a sharp peak).

    Returns
    -------
    log_integral : float
    err_estimate : float
        Estimated absolute error of ``log_integral``.

    Raises
    ------
    AccuracyError
        When the tolerance is not met after ``spec.max_subdivisions``
        panel splits; carries the best estimate.
    """
    spec = spec or QuadratureSpec()
    a = float(a)
    b = float(b)
    if not math.isfinite(a) or math.isnan(b) or not a < b:
        raise DomainError(f"integration limits must satisfy a < b, got [{a}, {b}]")

    if math.isinf(b):
        def g(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore"):
                one_minus = 1.0 - t
                x = a + t / one_minus
                out = np.full(t.shape, -np.inf)
                ok = one_minus > 0
                out[ok] = log_f(x[ok]) - 2.0 * np.log(one_minus[ok])
            return out

        lo, hi = 0.0, 1.0
        brk = [(p - a) / (1.0 + p - a) for p in points if a < p < math.inf]
    else:
        g = log_f
        lo, hi = a, b
        brk = [float(p) for p in points if a < p < b]

    nodes, weights = _reference_rule(spec)

    log_w = np.log(weights)

    def log_rules(intervals):
        """Rule estimates for many intervals from one integrand call."""
        iv = np.asarray(intervals, dtype=float).reshape(-1, 2)
        half = 0.5 * (iv[:, 1] - iv[:, 0])
        x = (0.5 * (iv[:, 0] + iv[:, 1]))[:, None] + half[:, None] * nodes[None, :]
        vals = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
        if np.isnan(vals).any():
            raise AccuracyError(f"integrand returned NaN on [{iv[0, 0]}, {iv[-1, 1]}]")
        if np.isposinf(vals).any():
            raise AccuracyError(f"integrand is infinite on [{iv[0, 0]}, {iv[-1, 1]}]")
        terms = vals + log_w[None, :]
        m = terms.max(axis=1)
        finite = np.isfinite(m)
        out = np.full(len(iv), -np.inf)
        with np.errstate(divide="ignore"):
            out[finite] = (m[finite]
                           + np.log(np.sum(np.exp(terms[finite] - m[finite, None]), axis=1))
                           + np.log(half[finite]))
        return out

    def make_panels(bounds, wholes=None):
        """Panels for ``bounds`` [(lo, hi), ...]; ``wholes`` are known
        single-rule estimates (from a parent's halves)."""
        mids = [0.5 * (l + h) for l, h in bounds]
        intervals = []
        for (l, h), m in zip(bounds, mids):
            intervals += [(l, m), (m, h)]
        if wholes is None:
            intervals += list(bounds)
        est = log_rules(intervals)
        k = len(bounds)
        if wholes is None:
            wholes = est[2 * k:]
        out = []
        for i, ((l, h), whole) in enumerate(zip(bounds, wholes)):
            left, right = est[2 * i], est[2 * i + 1]
            refined = float(np.logaddexp(left, right))
            out.append(_Panel(l, h, refined, _log_abs_diff(float(whole), refined), (left, right)))
        return out

    edges = sorted(set([lo, *brk, hi]))
    # Break points usually mark peaks.  A peak much narrower than its
    # segment can slip between the nodes of both neighbouring panels, so the
    # initial panels are graded geometrically toward each break point.
    graded = set(edges)
    for k in range(1, len(edges) - 1):
        p = edges[k]
        for side in (edges[k - 1], edges[k + 1]):
            graded.update(p + (side - p) * _GRADE_RATIO**-j for j in range(1, _GRADE_LEVELS + 1))
    edges = sorted(graded)
    panels = make_panels(list(zip(edges[:-1], edges[1:])))
    # max-heap on log error
    heap = [(-p.log_err, i, p) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    counter = len(heap)

    def totals():
        lv = log_sum_exp([p.log_value for _, _, p in heap])
        le = log_sum_exp([p.log_err for _, _, p in heap])
        return lv, le

    splits = 0
    while True:
        log_value, log_err = totals()
        if log_value == -np.inf:
            return -np.inf, 0.0
        err = math.exp(log_err - log_value) if log_err > -np.inf else 0.0
        if err <= spec.abs_tol or err <= spec.rel_tol * abs(log_value):
            return log_value, err
        if splits >= spec.max_subdivisions:
            raise AccuracyError(
                f"quadrature did not converge after {splits} subdivisions "
                f"(estimated error {err:.3g} in log integral)",
                best_estimate=log_value,
                error_estimate=err,
            )
        _, _, worst = heapq.heappop(heap)
        m = 0.5 * (worst.lo + worst.hi)
        if not worst.lo < m < worst.hi:
            raise AccuracyError(
                "quadrature panel width underflow",
                best_estimate=log_value,
                error_estimate=err,
            )
        for p in make_panels([(worst.lo, m), (m, worst.hi)], worst.halves):
            heapq.heappush(heap, (-p.log_err, counter, p))
            counter += 1
        splits += 1


# ---------------------------------------------------------------------------
# Scalar maximisation
# ---------------------------------------------------------------------------

def maximize_scalar(f, lo, hi, tol=1e-8, prescan=41):
    """Maximise a unimodal scalar function on ``[lo, hi]``.

    A coarse scan over ``prescan`` equally spaced points picks the bracket
    around the best grid value, then Brent's bounded method (golden section
    with parabolic steps) refines it.  Unimodality is not verified.  A
    constant function returns the midpoint of the interval.

    Returns
    -------
    argmax, max : float
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise DomainError(f"maximize_scalar requires lo < hi, got [{lo}, {hi}]")
    grid = np.linspace(lo, hi, prescan)
    vals = np.array([f(x) for x in grid], dtype=float)
    if np.isnan(vals).any():
        raise DomainError("objective returned NaN during the pre-scan")
    if np.all(vals == vals[0]):
        mid = 0.5 * (lo + hi)
        return mid, float(f(mid))
    k = int(np.argmax(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, prescan - 1)]
    res = optimize.minimize_scalar(
        lambda x: -f(x), bounds=(a, b), method="bounded", options={"xatol": tol}
    )
    best_x, best_f = float(res.x), float(-res.fun)
    # the bounded method never evaluates the bracket ends themselves
    for edge in (a, b):
        fe = float(f(edge))
        if fe > best_f:
            best_x, best_f = float(edge), fe
    return best_x, best_f


# ---------------------------------------------------------------------------
# Student t and gamma special functions
# ---------------------------------------------------------------------------

def student_t_cdf(x, nu):
    """CDF of Student's t with ``nu`` degrees of freedom.

    Computed from the regularised incomplete beta function,
    ``P(|T| > |x|) = I_{nu/(nu+x^2)}(nu/2, 1/2)``.
    """
    nu = float(nu)
    if not nu > 0 or math.isinf(nu):
        raise DomainError(f"degrees of freedom must be finite and > 0, got {nu}")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(np.isinf(x), 0.0, nu / (nu + x * x))
    tail = 0.5 * special.betainc(0.5 * nu, 0.5, z)
    out = np.where(x > 0, 1.0 - tail, tail)
    return float(out) if out.ndim == 0 else out


def student_t_quantile(p, nu):
    """Inverse of :func:`student_t_cdf`."""
    nu = float(nu)
    if not nu > 0 or math.isinf(nu):
        raise DomainError(f"degrees of freedom must be finite and > 0, got {nu}")
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0) | ~(p < 1)):
        raise DomainError("quantile probability must lie in (0, 1)")
    out = special.stdtrit(nu, p)
    return float(out) if out.ndim == 0 else out


def gammaln(x):
    """ln Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("gammaln requires x > 0")
    out = special.gammaln(x)
    return float(out) if out.ndim == 0 else out


def digamma(x):
    """Digamma function for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("digamma requires x > 0")
    out = special.digamma(x)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Runge-Kutta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OdeState:
    t: float
    y: np.ndarray
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        y = np.array(self.y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise DomainError("initial state must be finite")
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class Trajectory:
    """Recorded times ``t`` (shape ``(K,)``) and states ``y`` (``(K, ...)``).

    ``dt`` is the spacing between recorded states.
    """

    t: np.ndarray
    y: np.ndarray
    dt: float

    def __len__(self):
        return len(self.t)

    def __getitem__(self, k):
        return OdeState(float(self.t[k]), self.y[k], self.dt)

    @property
    def final(self) -> OdeState:
        return self[-1]


def rk4_integrate(deriv, y0: OdeState, t_end, dt=None, record_every=1):
    """Classical fixed-step fourth-order Runge-Kutta.

    Parameters
    ----------
    deriv : callable
        ``deriv(t, y) -> dy/dt``; ``y`` may have any array shape.
    y0 : OdeState
        Initial time, state and (default) step.
    t_end : float
    dt : float, optional
        Overrides ``y0.dt``.
    record_every : int
        Keep every ``record_every``-th state.  With the default of 1 the
        trajectory holds the state at every multiple of ``dt``.

    Raises
    ------
    DivergenceError
        As soon as a non-finite state appears.
    """
    dt = float(y0.dt if dt is None else dt)
    if not dt > 0:
        raise DomainError("dt must be > 0")
    n_steps = int(round((t_end - y0.t) / dt))
    if n_steps < 0:
        raise DomainError("t_end precedes the initial time")
    record_every = int(record_every)
    t0 = y0.t
    y = y0.y.copy()
    ts = [t0]
    ys = [y.copy()]
    half = 0.5 * dt
    sixth = dt / 6.0
    # overflow is caught by the finiteness checks
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            t = t0 + i * dt
            k1 = deriv(t, y)
            k2 = deriv(t + half, y + half * k1)
            k3 = deriv(t + half, y + half * k2)
            k4 = deriv(t + dt, y + dt * k3)
            y = y + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if (i + 1) % record_every == 0:
                if not np.all(np.isfinite(y)):
                    raise DivergenceError(
                        f"non-finite state at t={t + dt:.6g}", last_valid_time=ts[-1]
                    )
                ts.append(t0 + (i + 1) * dt)
                ys.append(y.copy())
    if not np.all(np.isfinite(y)):
        raise DivergenceError("non-finite final state", last_valid_time=ts[-1])
    return Trajectory(np.array(ts), np.array(ys), dt * record_every)


def downsample(traj: Trajectory, period=1.0, start=None):
    """Keep the states whose time is a multiple of ``period`` from ``start``."""
    start = traj.t[0] if start is None else start
    stride = int(round(period / traj.dt))
    if stride < 1 or not math.isclose(stride * traj.dt, period, rel_tol=1e-9):
        raise DomainError("period must be a multiple of the recorded step")
    offset = int(round((start - traj.t[0]) / traj.dt))
    if offset < 0:
        raise DomainError("start precedes the trajectory")
    idx = np.arange(offset, len(traj), stride)
    return Trajectory(traj.t[idx], traj.y[idx], period)
