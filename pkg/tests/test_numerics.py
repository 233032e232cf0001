import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from bayesdep.errors import AccuracyError, DivergenceError, DomainError
from bayesdep.numerics import (
    OdeState,
    QuadratureSpec,
    composite_gauss_legendre,
    digamma,
    downsample,
    gammaln,
    integrate,
    log_bessel_i0,
    log_bessel_i0e,
    log_sum_exp,
    maximize_scalar,
    rk4_integrate,
    student_t_cdf,
    student_t_quantile,
)

from oracles import central_difference, log_i0_quadrature, t_quantile_by_quadrature

BESSEL_GRID = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 19.5, 20.0, 20.5, 25.0, 30.0]


class TestLogSumExp:
    def test_two_zeros(self):
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2), abs=1e-15)

    def test_large_terms_shifted(self):
        assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000 + math.log(2), abs=1e-12)

    def test_minus_infinity_term_ignored(self):
        assert log_sum_exp([0.0, -math.inf]) == 0.0

    def test_all_minus_infinity(self):
        assert log_sum_exp([-math.inf, -math.inf]) == -math.inf

    def test_empty(self):
        with pytest.raises(DomainError):
            log_sum_exp([])

    def test_nan(self):
        with pytest.raises(DomainError):
            log_sum_exp([0.0, math.nan])

    @given(st.lists(st.floats(-300, 300), min_size=1, max_size=20))
    def test_matches_naive_sum(self, terms):
        assert log_sum_exp(terms) == pytest.approx(math.log(sum(math.exp(t) for t in terms)), abs=1e-12)


class TestLogBesselI0:
    def test_zero(self):
        assert log_bessel_i0(0.0) == 0.0

    def test_one(self):
        assert log_bessel_i0(1.0) == pytest.approx(math.log(1.2660658777520082), rel=1e-15)
        assert log_bessel_i0(1.0) == pytest.approx(log_i0_quadrature(1.0), rel=1e-13)

    @pytest.mark.parametrize("x", BESSEL_GRID)
    def test_against_integral_representation(self, x):
        # relative error of I0 itself, i.e. absolute error of its log
        assert abs(math.expm1(float(log_bessel_i0(x)) - log_i0_quadrature(x))) < 1e-10

    def test_large_argument_finite(self):
        v = float(log_bessel_i0(700.0))
        lead = 700 - 0.5 * math.log(1400 * math.pi)
        assert math.isfinite(v)
        # first correction term of the asymptotic series is ln(1 + 1/(8x));
        # the next one is O(1/x^2) ~ 1.4e-7
        assert v == pytest.approx(lead + math.log1p(1 / 5600), abs=1e-6)
        assert v == pytest.approx(math.log(special.i0e(700.0)) + 700.0, rel=1e-15)

    def test_huge_argument(self):
        assert math.isfinite(float(log_bessel_i0(1e6)))

    def test_continuous_at_switch(self):
        below = float(log_bessel_i0(np.nextafter(20.0, 0.0)))
        above = float(log_bessel_i0(np.nextafter(20.0, 40.0)))
        assert abs(above - below) < 1e-13

    def test_vectorised(self):
        x = np.array(BESSEL_GRID)
        np.testing.assert_allclose(log_bessel_i0(x), [log_bessel_i0(v) for v in x], rtol=0, atol=0)

    def test_monotone_and_convex(self):
        x = np.linspace(0, 60, 6001)
        v = log_bessel_i0(x)
        assert np.all(np.diff(v) > 0)
        assert np.all(np.diff(v, 2) > -1e-12)

    @pytest.mark.parametrize("bad", [-1e-3, math.inf, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            log_bessel_i0(bad)

    @given(st.floats(0, 500))
    def test_matches_scaled_scipy(self, x):
        assert float(log_bessel_i0(x)) == pytest.approx(
            math.log(special.i0e(x)) + x, rel=1e-13, abs=1e-13)

    @pytest.mark.parametrize("x", [0.0, 3.0, 20.0, 21.0, 1e3, 1e8, 1e15, 1e100])
    def test_scaled_version(self, x):
        # no cancellation against x even where x dwarfs ln I0(x) - x
        assert log_bessel_i0e(x) == pytest.approx(math.log(special.i0e(x)), rel=1e-13, abs=1e-15)

    def test_deterministic(self):
        a = log_bessel_i0(np.linspace(0, 50, 101))
        b = log_bessel_i0(np.linspace(0, 50, 101))
        assert np.array_equal(a, b)


class TestQuadratureSpec:
    @pytest.mark.parametrize("kwargs", [
        {"abs_tol": 0.0}, {"rel_tol": -1.0}, {"nodes_per_panel": 1},
        {"max_subdivisions": 0}, {"method": "romberg"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            QuadratureSpec(**kwargs)


class TestIntegrate:
    def test_square(self):
        v, err = integrate(lambda x: 2 * np.log(x), 0.0, 1.0)
        assert v == pytest.approx(math.log(1 / 3), abs=1e-12)
        assert err >= 0

    def test_normal_density(self):
        v, _ = integrate(lambda x: -0.5 * x * x - 0.5 * math.log(2 * math.pi), -8.0, 8.0)
        assert abs(v) < 1e-12

    def test_half_line_prior_density(self):
        def log_f(k):
            with np.errstate(divide="ignore"):
                return np.log(k) - 1.5 * np.log1p(k * k)

        v, _ = integrate(log_f, 0.0, math.inf)
        assert abs(v) < 1e-10

    def test_half_line_exponential(self):
        v, _ = integrate(lambda x: -x, 0.0, math.inf)
        assert abs(v) < 1e-11

    def test_huge_log_values(self):
        # exp(5000 - x^2) overflows in linear space
        v, _ = integrate(lambda x: 5000.0 - x * x, -10.0, 10.0)
        assert v == pytest.approx(5000 + 0.5 * math.log(math.pi), abs=1e-10)

    def test_narrow_peak_with_breakpoint(self):
        s = 1e-4
        v, _ = integrate(lambda x: -0.5 * ((x - 0.3) / s) ** 2, -1.0, 1.0, points=[0.3])
        assert v == pytest.approx(math.log(s * math.sqrt(2 * math.pi)), abs=1e-10)

    def test_simpson_method(self):
        spec = QuadratureSpec(method="adaptive-simpson", abs_tol=1e-9, rel_tol=1e-9,
                              max_subdivisions=20000)
        v, _ = integrate(lambda x: np.log(np.cos(x)), 0.0, 1.0, spec)
        assert v == pytest.approx(math.log(math.sin(1.0)), abs=1e-8)

    def test_zero_integrand(self):
        v, err = integrate(lambda x: np.full_like(x, -np.inf), 0.0, 1.0)
        assert v == -math.inf

    def test_nan_integrand_raises(self):
        with pytest.raises(AccuracyError):
            integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)

    def test_budget_exhaustion_carries_estimate(self):
        spec = QuadratureSpec(max_subdivisions=2, abs_tol=1e-15, rel_tol=1e-15)

        def log_f(x):
            with np.errstate(divide="ignore"):
                return -0.5 * np.log(x)

        with pytest.raises(AccuracyError) as info:
            integrate(log_f, 0.0, 1.0, spec)
        assert info.value.best_estimate is not None
        assert math.isfinite(info.value.best_estimate)

    @pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.0, 1.0), (-math.inf, 0.0)])
    def test_bad_limits(self, a, b):
        with pytest.raises(DomainError):
            integrate(lambda x: 0 * x, a, b)

    @pytest.mark.parametrize("nodes", [2, 3, 4])
    def test_convergence_order(self, nodes):
        exact = math.e - 1.0
        e1 = abs(composite_gauss_legendre(np.exp, 0.0, 1.0, 2, nodes) - exact)
        e2 = abs(composite_gauss_legendre(np.exp, 0.0, 1.0, 4, nodes) - exact)
        assert e1 / e2 >= 2 ** (2 * nodes - 1)

    def test_exact_on_polynomials(self):
        # n-point Gauss-Legendre integrates degree 2n - 1 exactly
        v = composite_gauss_legendre(lambda x: x**5, 0.0, 1.0, 1, 3)
        assert v == pytest.approx(1 / 6, abs=1e-15)
        # degree 2n: error shrinks by exactly 2^(2n) per halving
        e = [abs(composite_gauss_legendre(lambda x: x**6, 0.0, 1.0, p, 3) - 1 / 7) for p in (4, 8)]
        assert e[0] / e[1] == pytest.approx(64.0, rel=1e-3)

    def test_deterministic(self):
        f = lambda x: -np.abs(x - 0.2)  # noqa: E731
        assert integrate(f, -1.0, 1.0) == integrate(f, -1.0, 1.0)


class TestMaximizeScalar:
    def test_parabola(self):
        x, fx = maximize_scalar(lambda x: -(x - 0.3) ** 2, -1.0, 1.0, tol=1e-9)
        assert abs(x - 0.3) < 1e-8
        assert fx == pytest.approx(0.0, abs=1e-15)

    def test_maximum_at_edge(self):
        x, _ = maximize_scalar(lambda x: x, -1.0, 1.0)
        assert x == 1.0

    def test_constant_returns_midpoint(self):
        x, fx = maximize_scalar(lambda x: 4.0, -1.0, 3.0)
        assert x == 1.0 and fx == 4.0

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            maximize_scalar(lambda x: x, 1.0, 1.0)

    @given(st.floats(-0.95, 0.95))
    @settings(max_examples=30)
    def test_recovers_peak(self, c):
        x, _ = maximize_scalar(lambda x: -math.cosh(4 * (x - c)), -1.0, 1.0, tol=1e-9)
        assert abs(x - c) < 1e-7


class TestStudentT:
    def test_symmetry(self):
        assert student_t_cdf(0.0, 5) == 0.5

    def test_limits(self):
        assert student_t_cdf(math.inf, 5) == 1.0
        assert student_t_cdf(-math.inf, 5) == 0.0
        assert student_t_cdf(1e12, 5) == pytest.approx(1.0, abs=1e-15)

    def test_quantile_95(self):
        q = student_t_quantile(0.95, 5)
        assert q == pytest.approx(2.015048373333, abs=1e-9)
        assert q == pytest.approx(t_quantile_by_quadrature(0.95, 5), abs=1e-10)

    @pytest.mark.parametrize("p", [0.001, 0.1, 0.5, 0.77, 0.999])
    @pytest.mark.parametrize("nu", [1.0, 2.5, 5.0, 30.0])
    def test_quantile_cdf_round_trip(self, p, nu):
        assert abs(student_t_cdf(student_t_quantile(p, nu), nu) - p) < 1e-10

    def test_cdf_strictly_increasing(self):
        x = np.linspace(-20, 20, 4001)
        assert np.all(np.diff(student_t_cdf(x, 5)) > 0)

    def test_cdf_quantile_identity_on_grid(self):
        x = np.linspace(-15, 15, 301)
        np.testing.assert_allclose(student_t_quantile(student_t_cdf(x, 5), 5), x, atol=1e-8)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, math.nan])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            student_t_quantile(p, 5)

    @pytest.mark.parametrize("nu", [0.0, -1.0, math.inf])
    def test_nu_domain(self, nu):
        with pytest.raises(DomainError):
            student_t_cdf(0.0, nu)


class TestGammaFunctions:
    def test_values(self):
        assert gammaln(1.0) == 0.0
        assert gammaln(5.0) == pytest.approx(math.log(24), rel=1e-15)

    def test_digamma_one(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-15)
        assert digamma(1.0) == pytest.approx(central_difference(gammaln, 1.0), abs=1e-8)

    @pytest.mark.parametrize("x", [0.3, 2.0, 7.5, 40.0])
    def test_digamma_is_derivative(self, x):
        assert digamma(x) == pytest.approx(central_difference(gammaln, x), abs=1e-8)

    @pytest.mark.parametrize("fn", [gammaln, digamma])
    @pytest.mark.parametrize("x", [0.0, -2.0])
    def test_domain(self, fn, x):
        with pytest.raises(DomainError):
            fn(x)


class TestRungeKutta:
    def test_exponential_decay(self):
        traj = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], 1e-3), 1.0)
        assert traj.final.y[0] == pytest.approx(math.exp(-1), abs=1e-10)
        assert traj.final.t == pytest.approx(1.0)
        assert len(traj) == 1001

    def test_harmonic_period(self):
        def deriv(t, y):
            return np.array([y[1], -y[0]])

        dt = 2 * math.pi / 6284  # a whole number of steps per period, close to 1e-3
        traj = rk4_integrate(deriv, OdeState(0.0, [1.0, 0.0], dt), 2 * math.pi)
        assert np.max(np.abs(traj.final.y - [1.0, 0.0])) < 1e-6

    def test_fourth_order(self):
        errs = []
        for dt in (0.1, 0.05, 0.025):
            y = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], dt), 1.0).final.y[0]
            errs.append(abs(y - math.exp(-1)))
        ratios = [errs[0] / errs[1], errs[1] / errs[2]]
        for r in ratios:
            assert 14.0 < r < 18.0

    def test_time_dependent_rhs(self):
        traj = rk4_integrate(lambda t, y: np.array([math.cos(t)]), OdeState(0.0, [0.0], 1e-2), 2.0)
        assert traj.final.y[0] == pytest.approx(math.sin(2.0), abs=1e-10)

    def test_divergence(self):
        with pytest.raises(DivergenceError) as info:
            rk4_integrate(lambda t, y: y * y, OdeState(0.0, [1.0], 1e-2), 2.0)
        assert info.value.last_valid_time is not None
        # the exact solution 1/(1 - t) blows up at t = 1; RK4 overshoots slightly
        assert 0.9 < info.value.last_valid_time < 1.1

    def test_record_every_and_downsample(self):
        full = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], 0.01), 5.0)
        sparse = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], 0.01), 5.0, record_every=100)
        ds = downsample(full, 1.0)
        assert sparse.dt == pytest.approx(1.0)
        np.testing.assert_array_equal(ds.y, sparse.y)
        np.testing.assert_allclose(ds.t, [0, 1, 2, 3, 4, 5])

    def test_downsample_rejects_fractional_period(self):
        full = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], 0.3), 3.0)
        with pytest.raises(DomainError):
            downsample(full, 1.0)

    def test_bad_step(self):
        with pytest.raises(DomainError):
            OdeState(0.0, [1.0], 0.0)
        with pytest.raises(DomainError):
            OdeState(0.0, [math.nan], 0.1)

    def test_batched_state(self):
        y0 = np.array([[1.0, 2.0, 3.0]])
        traj = rk4_integrate(lambda t, y: -y, OdeState(0.0, y0, 1e-3), 1.0)
        np.testing.assert_allclose(traj.final.y, y0 * math.exp(-1), rtol=1e-10)
