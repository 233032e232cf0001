"""Seeded generators for every simulation scenario.

Each generator is a pure function of its parameters and a 64-bit seed.
Per-replication seeds are derived with :func:`derive_seed`, a splitmix64
chain; string keys are first hashed with BLAKE2b (8-byte digest).

Paired generators draw their random numbers row by row, so the dataset of
size N is the first N rows of the dataset of any larger size with the same
seed.  Sweeps over N therefore extend one dataset instead of drawing fresh
ones.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import PairedDataset
from .errors import DivergenceError, DomainError
from .models.circular import PhaseSample
from .numerics import OdeState, rk4_integrate, student_t_cdf

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """One splitmix64 output for state ``x`` (Steele, Lea & Flood constants)."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def _key_to_int(key) -> int:
    if isinstance(key, (bool, np.bool_)):
        return int(key)
    if isinstance(key, (int, np.integer)):
        return int(key) & MASK64
    digest = hashlib.blake2b(repr(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(base: int, *keys) -> int:
    """Mix a base seed with any number of keys into a 64-bit stream seed."""
    h = splitmix64(int(base) & MASK64)
    for key in keys:
        h = splitmix64(h ^ _key_to_int(key))
    return h


def _rng(seed, *keys):
    return np.random.default_rng(derive_seed(seed, *keys))


def _check_n(n):
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")


# ---------------------------------------------------------------------------
# Paired scenarios
# ---------------------------------------------------------------------------

def gen_noisy_normal(rho, tau2, sigma2, n, seed) -> PairedDataset:
    """Bivariate normal (0, tau2 M(rho)) plus N(0, sigma2) noise per coordinate."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    if not tau2 > 0 or not sigma2 >= 0:
        raise DomainError("need tau2 > 0 and sigma2 >= 0")
    _check_n(n)
    z = _rng(seed, "noisy-normal").standard_normal((n, 4))
    tau = math.sqrt(tau2)
    sigma = math.sqrt(sigma2)
    x = tau * z[:, 0]
    y = tau * (rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1])
    return PairedDataset(x + sigma * z[:, 2], y + sigma * z[:, 3])


def gen_functional(model, tau2, sigma2, n, seed) -> PairedDataset:
    """``model='h1'``: (T, T) + noise; ``model='h0'``: (U, V) + noise."""
    if model not in ("h0", "h1"):
        raise DomainError(f"model must be 'h0' or 'h1', got {model!r}")
    if not tau2 > 0 or not sigma2 >= 0:
        raise DomainError("need tau2 > 0 and sigma2 >= 0")
    _check_n(n)
    z = _rng(seed, "functional").standard_normal((n, 4))
    tau = math.sqrt(tau2)
    sigma = math.sqrt(sigma2)
    if model == "h1":
        x = tau * z[:, 0]
        y = x
    else:
        x = tau * z[:, 0]
        y = tau * z[:, 1]
    return PairedDataset(x + sigma * z[:, 2], y + sigma * z[:, 3])


@dataclass(frozen=True)
class GammaMargins:
    """(shape, rate) of the x and y gamma margins."""

    x: tuple = (4.0, 4.0)
    y: tuple = (10.0, 5.0)


def gamma_quantile(u, shape, rate):
    return special.gammaincinv(shape, u) / rate


def gen_gamma_tcopula(rho, n, seed, margins: GammaMargins | None = None, nu=5.0,
                      product=False) -> PairedDataset:
    """Gamma margins joined by a t copula (or the independence copula).

    The t pair is built as correlated normals divided by a shared
    ``sqrt(chi2_nu / nu)``; ``product=True`` uses independent uniforms.
    """
    margins = margins or GammaMargins()
    if not product and not -1.0 < rho < 1.0:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    _check_n(n)
    if product:
        uv = _rng(seed, "gamma-product").uniform(size=(n, 2))
        u, v = uv[:, 0], uv[:, 1]
    else:
        z = _rng(seed, "gamma-tcopula", "normal").standard_normal((n, 2))
        w = _rng(seed, "gamma-tcopula", "chi2").chisquare(nu, size=n)
        scale = np.sqrt(w / nu)
        s = z[:, 0] / scale
        t = (rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1]) / scale
        u = student_t_cdf(s, nu)
        v = student_t_cdf(t, nu)
    x = gamma_quantile(u, *margins.x)
    y = gamma_quantile(v, *margins.y)
    # u at exactly 0 would map to x = 0, outside the gamma support
    tiny = np.finfo(float).tiny
    return PairedDataset(np.maximum(x, tiny), np.maximum(y, tiny))


def gen_bivariate_t(rho, nu, n, seed, independent=False) -> PairedDataset:
    """Unit-variance bivariate Student t (heavy tails).

    ``independent=True`` draws the two coordinates as independent t
    variables instead of sharing the chi-square mixing variable.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    if not nu > 2:
        raise DomainError("nu must exceed 2 for a finite variance")
    _check_n(n)
    z = _rng(seed, "bivariate-t", "normal").standard_normal((n, 2))
    w = _rng(seed, "bivariate-t", "chi2").chisquare(nu, size=(n, 2))
    unit = math.sqrt((nu - 2) / nu)
    if independent:
        return PairedDataset(unit * z[:, 0] / np.sqrt(w[:, 0] / nu),
                             unit * z[:, 1] / np.sqrt(w[:, 1] / nu))
    scale = np.sqrt(w[:, 0] / nu)
    x = z[:, 0]
    y = rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1]
    return PairedDataset(unit * x / scale, unit * y / scale)


# ---------------------------------------------------------------------------
# Coupled Rossler oscillators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RosslerParams:
    mismatch: float = 0.015
    a: float = 0.165
    b: float = 0.2
    c: float = 10.0
    transient: float = 500.0
    dt: float = 1e-2


def rossler_initial_state(seed, oscillator: int) -> np.ndarray:
    """Random (x, y, z) start on the attractor's neighbourhood."""
    rng = _rng(seed, "rossler", "initial", oscillator)
    r = rng.uniform(1.0, 8.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([r * math.cos(phi), r * math.sin(phi), rng.uniform(0.0, 0.5)])


def rossler_deriv(coupling, omegas, p: RosslerParams):
    """Right-hand side for two x-coupled oscillators.

    State rows are (x1, y1, z1, x2, y2, z2); extra trailing axes are
    independent systems integrated in lock step.
    """
    w1, w2 = omegas
    a, b, c = p.a, p.b, p.c
    # everything except the z * x products is affine in the state
    lin = np.array([
        [-coupling, -w1, -1.0, coupling, 0.0, 0.0],
        [w1, a, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -c, 0.0, 0.0, 0.0],
        [coupling, 0.0, 0.0, -coupling, -w2, -1.0],
        [0.0, 0.0, 0.0, w2, a, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, -c],
    ])
    const = np.array([0.0, 0.0, b, 0.0, 0.0, b])

    def deriv(t, s):
        out = lin @ s
        out += const.reshape((6,) + (1,) * (s.ndim - 1))
        out[2::3] += s[2::3] * s[0::3]
        return out

    return deriv


def single_rossler_deriv(omega, p: RosslerParams):
    a, b, c = p.a, p.b, p.c

    def deriv(t, s):
        x, y, z = s
        out = np.empty_like(s)
        out[0] = -omega * y - z
        out[1] = omega * x + a * y
        out[2] = b + z * (x - c)
        return out

    return deriv


def rossler_trajectories(coupling, n_seconds, seeds, params: RosslerParams | None = None):
    """Integrate one coupled pair per seed and sample x1, x2 once per second.

    Returns an array of shape ``(len(seeds), n_seconds, 2)``.
    """
    p = params or RosslerParams()
    if coupling < 0:
        raise DomainError(f"coupling must be >= 0, got {coupling}")
    _check_n(n_seconds)
    seeds = list(seeds)
    y0 = np.stack(
        [np.concatenate([rossler_initial_state(s, 1), rossler_initial_state(s, 2)])
         for s in seeds],
        axis=1,
    )
    omegas = (1.0 + p.mismatch, 1.0 - p.mismatch)
    per_second = int(round(1.0 / p.dt))
    t_end = p.transient + n_seconds - 1
    try:
        traj = rk4_integrate(
            rossler_deriv(coupling, omegas, p),
            OdeState(0.0, y0, p.dt),
            t_end,
            record_every=per_second,
        )
    except DivergenceError as exc:
        raise DivergenceError(
            f"Rossler integration diverged (C={coupling}, seeds={seeds}): {exc}",
            exc.last_valid_time,
        ) from exc
    start = int(round(p.transient))
    kept = traj.y[start:start + n_seconds]  # (n_seconds, 6, M)
    return np.moveaxis(kept[:, [0, 3], :], 2, 0)


def _standardize(col):
    sd = col.std()
    if sd == 0:
        raise DomainError("constant trajectory cannot be standardized")
    return (col - col.mean()) / sd


def gen_rossler_batch(coupling, sigma2, n_seconds, seeds,
                      params: RosslerParams | None = None) -> list:
    """Vectorised :func:`gen_rossler` over several seeds.

    Each entry equals ``gen_rossler(coupling, sigma2, n_seconds, seed)``.
    """
    if not sigma2 >= 0:
        raise DomainError("sigma2 must be >= 0")
    seeds = list(seeds)
    xs = rossler_trajectories(coupling, n_seconds, seeds, params)
    sigma = math.sqrt(sigma2)
    out = []
    for seed, pair in zip(seeds, xs):
        u = _standardize(pair[:, 0])
        v = _standardize(pair[:, 1])
        noise = _rng(seed, "rossler", "noise").standard_normal((n_seconds, 2))
        out.append(PairedDataset(u + sigma * noise[:, 0], v + sigma * noise[:, 1]))
    return out


def gen_rossler(coupling, sigma2, n_seconds, seed,
                params: RosslerParams | None = None) -> PairedDataset:
    """Two diffusively x-coupled Rossler oscillators with frequency mismatch.

    The oscillators (omega = 1 +/- mismatch) are integrated with RK4, the
    transient is discarded and x1, x2 are sampled once per second.  Each
    column is centred and scaled to unit sample variance, then N(0, sigma2)
    observation noise is added, so the noisy-normal comparator applies
    with tau2 = 1.
    """
    return gen_rossler_batch(coupling, sigma2, n_seconds, [seed], params)[0]


# ---------------------------------------------------------------------------
# Phases
# ---------------------------------------------------------------------------

def sample_vonmises(mu, kappa, n, rng) -> np.ndarray:
    """Best-Fisher rejection sampler for the von Mises distribution."""
    if not kappa >= 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    if kappa < 1e-8:
        return rng.uniform(0.0, 2.0 * math.pi, size=n)
    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 16)
        u1, u2, u3 = rng.uniform(size=(3, m))
        z = np.cos(math.pi * u1)
        f = (1.0 + r * z) / (r + z)
        c = kappa * (r - f)
        ok = (c * (2.0 - c) - u2 > 0) | (np.log(c / u2) + 1.0 - c >= 0)
        theta = np.sign(u3[ok] - 0.5) * np.arccos(np.clip(f[ok], -1.0, 1.0))
        take = min(theta.size, n - filled)
        out[filled:filled + take] = theta[:take]
        filled += take
    return np.mod(mu + out, 2.0 * math.pi)


def gen_phase(model, n, seed, mu=0.0, kappa=0.0) -> PhaseSample:
    """``model='uniform'`` or ``'vonmises'`` phases."""
    _check_n(n)
    if model == "uniform":
        return PhaseSample(_rng(seed, "phase").uniform(0.0, 2.0 * math.pi, size=n))
    if model == "vonmises":
        return PhaseSample(sample_vonmises(mu, kappa, n, _rng(seed, "phase")))
    raise DomainError(f"unknown phase model {model!r}")
