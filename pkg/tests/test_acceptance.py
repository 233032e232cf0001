"""Acceptance criteria AC-1 to AC-13.

Each test carries ``@pytest.mark.criterion("AC-n")``; the session summary
prints one PASS/FAIL line per criterion.  Sweeps use their own seeds and
write into temporary directories.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

import bayesdep
from bayesdep.datagen import derive_seed, gen_bivariate_t, gen_noisy_normal
from bayesdep.experiments import (
    SweepConfig,
    itc_table,
    load_config,
    run_sweep,
    select,
    trend_stats,
)
from bayesdep.cli import main as cli_main
from bayesdep.models import (
    NoisyNormalParams,
    functional_lnbf,
    misspecification_trend,
    noisy_normal_comparator,
    noisy_normal_lnbf,
    vonmises_log_bf,
    vonmises_logr_from_stats,
)
from bayesdep.numerics import OdeState, log_bessel_i0, rk4_integrate, student_t_cdf, student_t_quantile

from oracles import functional_mc, log_i0_quadrature, noisy_normal_mc, vonmises_log_bf_grid

CONFIG_DIR = Path(bayesdep.__file__).parent / "configs"
N_AXIS = [20, 40, 60, 80, 100, 120, 140, 160, 180, 200]


def sweep(scenario, comparator, axes, replications=200, seed=1):
    config = SweepConfig.from_dict({
        "scenario": scenario, "comparator": comparator, "axes": axes,
        "replications": replications, "seed": seed,
    })
    return run_sweep(config, output=None)


def medians(summaries):
    return np.array([s.median for s in summaries])


# ---------------------------------------------------------------------------
# AC-1  exact comparators vs Monte Carlo marginal likelihoods
# ---------------------------------------------------------------------------

AC1_DATASETS = [(n, rho, derive_seed(101, k))
                for k, (n, rho) in enumerate([(3, 0.0), (5, 0.4), (7, -0.6), (8, 0.9), (10, 0.2)])]


@pytest.mark.criterion("AC-1")
class TestAC1:
    def test_noisy_normal_within_three_se(self):
        start = time.perf_counter()
        for n, rho, seed in AC1_DATASETS:
            d = gen_noisy_normal(rho, 1.0, 0.1, n, seed)
            exact = noisy_normal_lnbf(d, NoisyNormalParams(1.0, 0.1, 0.0)).value
            mc, se = noisy_normal_mc(d.x[:, 0], d.y[:, 0], 1.0, 0.1, 0.0, draws=10**6, seed=seed % 2**32)
            assert abs(exact - mc) <= 3 * se, (n, rho, exact, mc, se)
        assert time.perf_counter() - start < 120

    def test_functional_within_three_se(self):
        start = time.perf_counter()
        for n, rho, seed in AC1_DATASETS:
            d = gen_noisy_normal(rho, 1.0, 0.5, n, seed)
            exact = functional_lnbf(d, 1.0, 0.5).value
            mc, se = functional_mc(d.x[:, 0], d.y[:, 0], 1.0, 0.5, draws=10**6, seed=seed % 2**32)
            assert abs(exact - mc) <= 3 * se, (n, rho, exact, mc, se)
        assert time.perf_counter() - start < 120


# ---------------------------------------------------------------------------
# AC-2 .. AC-5  noisy-normal sweeps
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-2")
def test_ac2_h0_trend(tmp_path):
    config = load_config(CONFIG_DIR / "fig1_desk.json")
    assert config.axes == {"N": N_AXIS} and config.replications == 200
    assert config.scenario_params == {"rho": 0.0, "tau2": 1.0, "sigma2": 1e-4}
    start = time.perf_counter()
    result = run_sweep(config, output=tmp_path)
    assert time.perf_counter() - start < 60
    t = trend_stats(result.summaries, "N", "decreasing")
    assert all(m < 0 for m in t.medians)
    assert np.all(np.diff(t.medians) <= 0)
    assert t.monotone_fraction * 9 >= 8


@pytest.mark.criterion("AC-3")
def test_ac3_h1_trend():
    start = time.perf_counter()
    result = sweep({"kind": "noisy-normal", "rho": 0.5, "sigma2": 0.1},
                   {"name": "noisy-normal", "eps": 0.0}, {"N": N_AXIS}, seed=3)
    assert time.perf_counter() - start < 60
    t = trend_stats(result.summaries, "N", "increasing")
    assert all(m > 0 for n, m in zip(t.axis_values, t.medians) if n >= 40)
    assert t.monotone_fraction == 1.0
    assert t.linear_fit_r2 >= 0.9


@pytest.mark.criterion("AC-4")
def test_ac4_monotone_in_rho():
    rhos = [round(0.1 * k, 1) for k in range(10)]
    result = sweep({"kind": "noisy-normal", "sigma2": 0.1, "N": 100},
                   {"name": "noisy-normal"}, {"rho": rhos}, seed=4)
    t = trend_stats(result.summaries, "rho", "increasing")
    assert np.all(np.diff(t.medians) >= 0)
    assert t.monotone_fraction * 9 >= 8


@pytest.mark.criterion("AC-5")
def test_ac5_eps_prior_favours_h0_at_zero_rho():
    result = sweep({"kind": "noisy-normal", "rho": 0.0, "sigma2": 1e-4, "N": 200},
                   {"name": "noisy-normal"}, {"eps": [0.0, 0.2]}, seed=5)
    (at0,) = select(result.summaries, eps=0.0)
    (at2,) = select(result.summaries, eps=0.2)
    assert at2.median <= at0.median


# ---------------------------------------------------------------------------
# AC-6  functional model
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def functional_grid():
    return sweep({"kind": "functional"}, {"name": "functional"},
                 {"model": ["h0", "h1"], "sigma2": [1e-4, 1.0], "N": N_AXIS}, seed=6)


@pytest.mark.criterion("AC-6")
class TestAC6:

    @pytest.mark.parametrize("sigma2", [1e-4, 1.0])
    def test_h0_negative_decreasing(self, functional_grid, sigma2):
        t = trend_stats(select(functional_grid.summaries, model="h0", sigma2=sigma2), "N", "decreasing")
        assert all(m < 0 for m in t.medians)
        assert t.monotone_fraction == 1.0

    @pytest.mark.parametrize("sigma2", [1e-4, 1.0])
    def test_h1_positive_increasing(self, functional_grid, sigma2):
        t = trend_stats(select(functional_grid.summaries, model="h1", sigma2=sigma2), "N", "increasing")
        assert all(m > 0 for m in t.medians)
        assert t.monotone_fraction == 1.0

    def test_sign_correct_at_n100(self):
        result = sweep({"kind": "functional", "sigma2": 1e-2, "N": 100}, {"name": "functional"},
                       {"model": ["h0", "h1"]}, seed=66)
        for model, sign in (("h0", -1), ("h1", 1)):
            values = [r.d_logr for r in result.records if r.cell["model"] == model]
            assert np.mean(np.sign(values) == sign) >= 0.95


# ---------------------------------------------------------------------------
# AC-7  gamma margins with a t copula
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-7")
class TestAC7:
    N = [20, 40, 60, 80, 100]

    def run(self, **scenario):
        return sweep({"kind": "gamma-tcopula", **scenario}, {"name": "copula"}, {"N": self.N},
                     seed=7)

    def test_product_copula_negative_decreasing(self):
        t = trend_stats(self.run(copula="product").summaries, "N", "decreasing")
        assert all(m < 0 for m in t.medians)
        assert t.monotone_fraction == 1.0

    def test_strong_dependence_positive_increasing(self):
        t = trend_stats(self.run(rho=0.7).summaries, "N", "increasing")
        assert all(m > 0 for m in t.medians)
        assert t.monotone_fraction == 1.0

    def test_increasing_in_rho(self):
        strong = medians(self.run(rho=0.7).summaries)
        weak = medians(self.run(rho=0.2).summaries)
        assert np.all(strong > weak)


# ---------------------------------------------------------------------------
# AC-8  coupled Rossler oscillators
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-8")
def test_ac8_rossler_coupling():
    start = time.perf_counter()
    couplings = [0.0, 1e-3, 1e-2, 1e-1, 1.0]
    result = sweep({"kind": "rossler", "sigma2": 1e-2, "N": 50}, {"name": "noisy-normal"},
                   {"C": couplings}, replications=50, seed=8)
    assert time.perf_counter() - start < 600
    m = medians(result.summaries)
    assert m[-1] > m[0]
    assert int(np.sum(np.diff(m) < 0)) <= 1


# ---------------------------------------------------------------------------
# AC-9  inter-trial coherence table
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def table():
    config = load_config(CONFIG_DIR / "fig5_itc.json")
    return itc_table(config.n_grid, config.rbar_grid)


@pytest.mark.criterion("AC-9")
class TestAC9:
    def test_increasing_in_rbar_at_n100(self):
        rbar = [round(0.1 * k, 1) for k in range(1, 10)]
        values = [vonmises_logr_from_stats(100, r).logr for r in rbar]
        assert np.all(np.diff(values) > 0)

    def test_low_coherence_row_decreasing_in_n(self, table):
        row = table.values[table.rbar_grid.index(0.05)]
        assert table.n_grid == (10, 20, 50, 100, 200, 500, 1000)
        assert np.all(np.diff(row) < 0), row

    def test_high_coherence_row_increasing_in_n(self, table):
        assert np.all(np.diff(table.values[table.rbar_grid.index(0.5)]) > 0)

    def test_interior_minimum_for_intermediate_coherence(self, table):
        interior = [r for r, n0 in zip(table.rbar_grid, table.n0)
                    if 0.1 <= r <= 0.3 and table.n_grid[0] < n0 < table.n_grid[-1]]
        assert interior

    def test_single_phase_is_neutral(self):
        assert abs(vonmises_logr_from_stats(1, 1.0).logr) <= 1e-8


# ---------------------------------------------------------------------------
# AC-10  exact evidence vs its large-sample expansion
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-10")
def test_ac10_bounded_gap_to_asymptotic_form():
    comparator = noisy_normal_comparator(tau2=1.0, sigma2=1e-8, eps=0.0)
    gaps = []
    for n in (50, 100, 200, 500, 1000):
        d = gen_noisy_normal(0.5, 1.0, 0.0, n, 10)
        r = np.corrcoef(d.x[:, 0], d.y[:, 0])[0, 1]
        ihat = -0.5 * math.log1p(-r * r)
        gaps.append(comparator(d).value - (n * ihat - 0.5 * math.log(n)))
    assert max(abs(g) for g in gaps) <= 3.0, gaps


# ---------------------------------------------------------------------------
# AC-11  behaviour under a third generative model
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-11")
def test_ac11_misspecification_signs():
    comparator = noisy_normal_comparator(tau2=1.0, sigma2=0.0, eps=0.0)
    grid = [20, 60, 100, 140, 180]
    dependent = misspecification_trend(lambda n, s: gen_bivariate_t(0.6, 5.0, n, s),
                                       comparator, grid, 60, 11)
    independent = misspecification_trend(
        lambda n, s: gen_bivariate_t(0.0, 5.0, n, s, independent=True), comparator, grid, 60, 12)
    assert dependent.sign == 1
    assert independent.sign == -1


# ---------------------------------------------------------------------------
# AC-12  numerical kernels against oracles
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-12")
class TestAC12:
    def test_bessel(self):
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]:
            assert abs(math.expm1(float(log_bessel_i0(x)) - log_i0_quadrature(x))) < 1e-10

    @pytest.mark.parametrize("n, rbar", [(10, 0.1), (10, 0.5), (20, 0.3), (50, 0.2), (100, 0.5),
                                         (100, 0.1), (200, 0.05), (500, 0.15), (1000, 0.3)])
    def test_vonmises_integral(self, n, rbar):
        assert abs(math.expm1(vonmises_log_bf(n, rbar).value - vonmises_log_bf_grid(n, rbar))) < 1e-6

    def test_t_round_trip(self):
        p = np.array([1e-6, 1e-3, 0.05, 0.3, 0.5, 0.77, 0.99, 1 - 1e-6])
        for nu in (1.0, 2.5, 5.0, 30.0):
            assert np.max(np.abs(student_t_cdf(student_t_quantile(p, nu), nu) - p)) < 1e-8

    def test_rk4_fourth_order(self):
        errs = []
        for dt in (0.1, 0.05, 0.025):
            y = rk4_integrate(lambda t, y: -y, OdeState(0.0, [1.0], dt), 1.0).final.y[0]
            errs.append(abs(y - math.exp(-1)))
        orders = [math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])]
        assert all(abs(o - 4.0) < 0.2 for o in orders)


# ---------------------------------------------------------------------------
# AC-13  determinism of shipped configs
# ---------------------------------------------------------------------------

@pytest.mark.criterion("AC-13")
class TestAC13:
    def test_fig1_sweep_bytes(self, tmp_path):
        cfg = CONFIG_DIR / "fig1_desk.json"
        for run in ("a", "b"):
            assert cli_main(["sweep", "--config", str(cfg), "--out", str(tmp_path / run)]) == 0
        for name in ("records.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_fig5_table_bytes(self, tmp_path):
        cfg = CONFIG_DIR / "fig5_itc.json"
        for run in ("a", "b"):
            assert cli_main(["sweep", "--config", str(cfg), "--out", str(tmp_path / f"{run}.csv")]) == 0
        for suffix in ("", "_n0", "_reference"):
            assert (tmp_path / f"a{suffix}.csv").read_bytes() == (tmp_path / f"b{suffix}.csv").read_bytes()
