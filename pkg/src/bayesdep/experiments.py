"""Replicated simulation sweeps over parameter grids.

A sweep crosses named axes (sample size ``N``, noise ``sigma2``, ``rho``,
coupling ``C``, prior truncation ``eps``...), draws M datasets per grid
cell, evaluates a comparator on each and summarises the log10 odds by
nearest-rank quartiles.

Replication seeds are derived from the base seed, the scenario kind, the
cell's data-generating parameters other than ``N`` and the replication
index.  Consequences: results do not depend on grid order; comparator-only
axes (e.g. ``eps``) re-use the same datasets; and along ``N`` each
replication grows one dataset instead of redrawing it.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import datagen
from .core import PriorOdds, combine
from .errors import BayesDepError, ConfigError, DomainError, SweepError
from .models import (
    copula_comparator,
    functional_comparator,
    known_normal_comparator,
    n0_curve,
    nested_normal_comparator,
    noisy_normal_comparator,
    vonmises_comparator,
    vonmises_logr_from_stats,
)
from .numerics import QuadratureSpec

SAMPLE_SIZE = "N"
THREADS_ENV = "BAYESDEP_THREADS"


# ---------------------------------------------------------------------------
# Scenario and comparator registries
# ---------------------------------------------------------------------------

def _gen_noisy_normal(p, n, seeds):
    return [datagen.gen_noisy_normal(p["rho"], p["tau2"], p["sigma2"], n, s) for s in seeds]


def _gen_functional(p, n, seeds):
    return [datagen.gen_functional(p["model"], p["tau2"], p["sigma2"], n, s) for s in seeds]


def _gen_gamma(p, n, seeds):
    margins = datagen.GammaMargins((p["shape_x"], p["rate_x"]), (p["shape_y"], p["rate_y"]))
    product = p["copula"] == "product"
    if p["copula"] not in ("t", "product"):
        raise ConfigError(f"copula must be 't' or 'product', got {p['copula']!r}")
    return [
        datagen.gen_gamma_tcopula(p["rho"], n, s, margins, p["nu"], product=product)
        for s in seeds
    ]


def _gen_rossler(p, n, seeds):
    params = datagen.RosslerParams(
        p["mismatch"], p["a"], p["b"], p["c"], p["transient"], p["dt"]
    )
    return datagen.gen_rossler_batch(p["C"], p["sigma2"], n, seeds, params)


def _gen_phase(p, n, seeds):
    return [datagen.gen_phase(p["model"], n, s, p["mu"], p["kappa"]) for s in seeds]


def _gen_bivariate_t(p, n, seeds):
    return [
        datagen.gen_bivariate_t(p["rho"], p["nu"], n, s, bool(p["independent"]))
        for s in seeds
    ]


SCENARIOS = {
    "noisy-normal": ({"rho": 0.0, "tau2": 1.0, "sigma2": 0.0}, _gen_noisy_normal),
    "functional": ({"model": "h1", "tau2": 1.0, "sigma2": 1.0}, _gen_functional),
    "gamma-tcopula": (
        {"rho": 0.0, "copula": "t", "nu": 5.0, "shape_x": 4.0, "rate_x": 4.0,
         "shape_y": 10.0, "rate_y": 5.0},
        _gen_gamma,
    ),
    "rossler": (
        {"C": 0.0, "sigma2": 0.01, **asdict(datagen.RosslerParams())},
        _gen_rossler,
    ),
    "phase": ({"model": "uniform", "mu": 0.0, "kappa": 0.0}, _gen_phase),
    "bivariate-t": ({"rho": 0.0, "nu": 5.0, "independent": False}, _gen_bivariate_t),
}

COMPARATORS = {
    "noisy-normal": ({"tau2": 1.0, "sigma2": 0.0, "eps": 0.0},
                     lambda p: noisy_normal_comparator(p["tau2"], p["sigma2"], p["eps"])),
    "functional": ({"tau2": 1.0, "sigma2": 1.0},
                   lambda p: functional_comparator(p["tau2"], p["sigma2"])),
    "copula": ({"nu": 5.0}, lambda p: copula_comparator(p["nu"])),
    "vonmises": ({}, lambda p: vonmises_comparator()),
    "nested-normal": ({}, lambda p: nested_normal_comparator()),
    "known-normal": ({"rho": 0.5, "tau2": 1.0},
                     lambda p: known_normal_comparator(p["rho"], p["tau2"])),
}

# comparator parameters that describe the generating process rather than the
# analysis; when not set explicitly they follow the scenario's value
_INHERITED = {
    ("rossler", "noisy-normal"): {"sigma2"},
}
_DEFAULT_INHERIT = {"tau2", "sigma2", "nu"}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    """Resolved sweep description.

    ``scenario_params`` and ``comparator_params`` are templates; every axis
    name must be ``N`` or a parameter of the scenario and/or comparator.
    """

    scenario: str
    comparator: str
    axes: dict
    replications: int
    seed: int
    scenario_params: dict = field(default_factory=dict)
    comparator_params: dict = field(default_factory=dict)
    prior_log_odds: float = 0.0
    output: str | None = None
    name: str = "sweep"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario kind {self.scenario!r}")
        if self.comparator not in COMPARATORS:
            raise ConfigError(f"unknown comparator {self.comparator!r}")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError("replications must be an integer >= 1")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        s_schema, _ = SCENARIOS[self.scenario]
        c_schema, _ = COMPARATORS[self.comparator]
        for key in self.scenario_params:
            if key not in s_schema and key != SAMPLE_SIZE:
                raise ConfigError(f"unknown scenario parameter {key!r}")
        for key in self.comparator_params:
            if key not in c_schema:
                raise ConfigError(f"unknown comparator parameter {key!r}")
        if not self.axes:
            raise ConfigError("axes must not be empty")
        for key, values in self.axes.items():
            if key != SAMPLE_SIZE and key not in s_schema and key not in c_schema:
                raise ConfigError(f"unknown axis {key!r}")
            if not isinstance(values, (list, tuple)) or not values:
                raise ConfigError(f"axis {key!r} needs a non-empty list of values")
        if SAMPLE_SIZE not in self.axes and SAMPLE_SIZE not in self.scenario_params:
            raise ConfigError("sample size 'N' must be an axis or a scenario parameter")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        required = ("scenario", "comparator", "axes", "replications", "seed")
        for key in required:
            if key not in d:
                raise ConfigError(f"missing required key {key!r}")
        known = set(required) | {"prior_log_odds", "output", "name"}
        for key in d:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
        scenario = dict(d["scenario"])
        comparator = dict(d["comparator"])
        if "kind" not in scenario:
            raise ConfigError("scenario needs a 'kind'")
        if "name" not in comparator:
            raise ConfigError("comparator needs a 'name'")
        return cls(
            scenario=scenario.pop("kind"),
            comparator=comparator.pop("name"),
            axes={k: list(v) if isinstance(v, (list, tuple)) else v
                  for k, v in d["axes"].items()},
            replications=d["replications"],
            seed=d["seed"],
            scenario_params=scenario,
            comparator_params=comparator,
            prior_log_odds=float(d.get("prior_log_odds", 0.0)),
            output=d.get("output"),
            name=d.get("name", "sweep"),
        )

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        """Fully resolved form, defaults included, for provenance."""
        s_schema, _ = SCENARIOS[self.scenario]
        c_schema, _ = COMPARATORS[self.comparator]
        return {
            "name": self.name,
            "scenario": {"kind": self.scenario, **s_schema, **self.scenario_params},
            "comparator": {"name": self.comparator, **c_schema, **self.comparator_params},
            "axes": self.axes,
            "replications": self.replications,
            "seed": self.seed,
            "prior_log_odds": self.prior_log_odds,
            "output": self.output,
        }

    @property
    def axis_names(self):
        return list(self.axes)

    def cells(self):
        names = self.axis_names
        for combo in itertools.product(*(self.axes[k] for k in names)):
            yield dict(zip(names, combo))

    def resolve(self, cell: dict):
        """Scenario params, comparator params and N for one grid cell."""
        s_schema, _ = SCENARIOS[self.scenario]
        c_schema, _ = COMPARATORS[self.comparator]
        sp = {**s_schema, **self.scenario_params}
        for k, v in cell.items():
            if k in s_schema or k == SAMPLE_SIZE:
                sp[k] = v
        n = sp.pop(SAMPLE_SIZE)
        inherit = _INHERITED.get((self.scenario, self.comparator), _DEFAULT_INHERIT)
        cp = dict(c_schema)
        for k in c_schema:
            if k in inherit and k in sp:
                cp[k] = sp[k]
        cp.update(self.comparator_params)
        for k, v in cell.items():
            if k in c_schema:
                cp[k] = v
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise ConfigError(f"N must be a positive integer, got {n!r}")
        return sp, cp, int(n)


def _canonical(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return float(v)
    return v


def replication_seeds(config: SweepConfig, scenario_params: dict):
    data_key = repr(sorted((k, _canonical(v)) for k, v in scenario_params.items()))
    return [
        datagen.derive_seed(config.seed, config.scenario, data_key, r)
        for r in range(config.replications)
    ]


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Record:
    cell: dict
    rep: int
    seed: int
    d_logr: float
    approximate: bool
    error: str | None = None


@dataclass(frozen=True)
class CellSummary:
    cell: dict
    m: int
    q25: float
    median: float
    q75: float
    frac_positive: float
    mean: float
    failed: int = 0


def nearest_rank_quartiles(values):
    """(q25, median, q75) with the nearest-rank rule: the ceil(p M)-th
    smallest value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise DomainError("no values to summarise")
    out = []
    for p in (0.25, 0.5, 0.75):
        k = max(int(math.ceil(p * v.size)), 1)
        out.append(float(v[k - 1]))
    return tuple(out)


def summarize(cell, values, failed=0) -> CellSummary:
    v = np.asarray(values, dtype=float)
    q25, med, q75 = nearest_rank_quartiles(v)
    return CellSummary(
        dict(cell), int(v.size), q25, med, q75,
        float(np.mean(v > 0)), float(np.mean(v)), failed,
    )


@dataclass
class SweepResult:
    config: SweepConfig
    records: list
    summaries: list
    elapsed: float = 0.0

    def records_csv(self) -> str:
        return records_to_csv(self.config, self.records)

    def summary_csv(self) -> str:
        return summaries_to_csv(self.config, self.summaries)


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(config: SweepConfig, records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["comparator", *config.axis_names, "rep", "seed", "d_logr", "approx_flag"])
    for r in records:
        w.writerow([
            config.comparator,
            *(_fmt(r.cell[k]) for k in config.axis_names),
            r.rep, r.seed, _fmt(float(r.d_logr)), _fmt(r.approximate),
        ])
    return buf.getvalue()


def summaries_to_csv(config: SweepConfig, summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["comparator", *config.axis_names, "M", "q25", "median", "q75",
                "frac_positive", "mean"])
    for s in summaries:
        w.writerow([
            config.comparator,
            *(_fmt(s.cell[k]) for k in config.axis_names),
            s.m, *(_fmt(float(x)) for x in (s.q25, s.median, s.q75, s.frac_positive, s.mean)),
        ])
    return buf.getvalue()


def read_records_csv(text: str, config: SweepConfig):
    """Parse a records CSV back into ``{cell key: [d_logr, ...]}``."""
    reader = csv.DictReader(io.StringIO(text))
    out = {}
    for row in reader:
        key = tuple(row[k] for k in config.axis_names)
        value = float(row["d_logr"])
        if not math.isnan(value):
            out.setdefault(key, []).append(value)
    return out


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _run_cell(config: SweepConfig, cell: dict):
    _, gen = SCENARIOS[config.scenario]
    _, make = COMPARATORS[config.comparator]
    sp, cp, n = config.resolve(cell)
    comparator = make(cp)
    prior = PriorOdds(config.prior_log_odds)
    seeds = replication_seeds(config, sp)
    datasets = gen(sp, n, seeds)
    records = []
    for rep, (seed, data) in enumerate(zip(seeds, datasets)):
        try:
            m = combine(prior, comparator(data))
            records.append(Record(cell, rep, seed, m.logr, m.approximate))
        except BayesDepError as exc:
            records.append(Record(cell, rep, seed, math.nan, comparator.approximate,
                                  f"{type(exc).__name__}: {exc}"))
    return records


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(config: SweepConfig, workers: int | None = None, output=None) -> SweepResult:
    """Run every cell of the grid and summarise it.

    Parameters
    ----------
    config : SweepConfig
    workers : int, optional
        Worker processes; defaults to ``$BAYESDEP_THREADS`` or the CPU count.
    output : path, optional
        Directory receiving ``records.csv``, ``summary.csv`` and
        ``config.json``; defaults to ``config.output``.  Nothing is written
        when both are None.

    Raises
    ------
    SweepError
        If more than 1% of the replications in a cell fail.
    """
    start = time.perf_counter()
    workers = default_workers() if workers is None else max(1, int(workers))
    cells = list(config.cells())
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
            per_cell = list(pool.map(_run_cell, [config] * len(cells), cells))
    else:
        per_cell = [_run_cell(config, cell) for cell in cells]

    records, summaries = [], []
    for cell, recs in zip(cells, per_cell):
        failed = [r for r in recs if r.error is not None]
        if len(failed) > 0.01 * config.replications:
            raise SweepError(
                f"cell {cell}: {len(failed)}/{config.replications} replications failed; "
                f"first error: {failed[0].error}"
            )
        records.extend(recs)
        good = [r.d_logr for r in recs if r.error is None]
        summaries.append(summarize(cell, good, len(failed)))

    result = SweepResult(config, records, summaries, time.perf_counter() - start)
    out = output if output is not None else config.output
    if out is not None:
        write_sweep(result, out)
    return result


def write_sweep(result: SweepResult, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "records.csv").write_text(result.records_csv(), encoding="utf-8", newline="\n")
    (d / "summary.csv").write_text(result.summary_csv(), encoding="utf-8", newline="\n")
    (d / "config.json").write_text(
        json.dumps(result.config.to_dict(), indent=2) + "\n", encoding="utf-8", newline="\n"
    )


def select(summaries, **fixed):
    """Summaries whose cell matches every ``name=value`` in ``fixed``."""
    return [s for s in summaries if all(s.cell.get(k) == v for k, v in fixed.items())]


# ---------------------------------------------------------------------------
# Trend statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrendStats:
    axis_values: tuple
    medians: tuple
    direction: str
    monotone_fraction: float
    linear_fit_r2: float
    log_fit_r2: float
    sign_pattern: tuple


def _r2(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    return 1.0 - float(np.sum(resid**2)) / ss_tot


def trend_from_medians(axis_values, medians, direction="increasing") -> TrendStats:
    if direction not in ("increasing", "decreasing"):
        raise DomainError("direction must be 'increasing' or 'decreasing'")
    if len(axis_values) < 3:
        raise DomainError("trend statistics need at least 3 cells")
    order = np.argsort(axis_values, kind="stable")
    x = [float(axis_values[i]) for i in order]
    y = [float(medians[i]) for i in order]
    diffs = np.diff(y)
    good = diffs > 0 if direction == "increasing" else diffs < 0
    log_r2 = _r2(np.log(x), y) if all(v > 0 for v in x) else math.nan
    return TrendStats(
        tuple(x), tuple(y), direction, float(np.mean(good)), _r2(x, y), log_r2,
        tuple(int(np.sign(v)) for v in y),
    )


def trend_stats(summaries, axis, direction="increasing") -> TrendStats:
    """Monotonicity and fit quality of cell medians along one axis.

    ``summaries`` should vary only along ``axis`` (see :func:`select`).
    ``monotone_fraction`` counts adjacent pairs that strictly move in
    ``direction``; R^2 values come from least-squares lines of the median
    against the axis value and against its logarithm.
    """
    return trend_from_medians([s.cell[axis] for s in summaries],
                              [s.median for s in summaries], direction)


# ---------------------------------------------------------------------------
# Inter-trial coherence table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ItcTable:
    n_grid: tuple
    rbar_grid: tuple
    values: np.ndarray  # (len(rbar_grid), len(n_grid)) log10 odds
    n0: tuple

    @property
    def reference(self):
        """The curve (N, 1/sqrt(N)): typical R under uniform phases."""
        return [(n, 1.0 / math.sqrt(n)) for n in self.n_grid]

    def table_csv(self) -> str:
        lines = ["rbar,n,d_logr"]
        for i, r in enumerate(self.rbar_grid):
            for j, n in enumerate(self.n_grid):
                lines.append(f"{_fmt(float(r))},{n},{_fmt(float(self.values[i, j]))}")
        return "\n".join(lines) + "\n"

    def n0_csv(self) -> str:
        lines = ["rbar,n0,d_logr_min"]
        for i, r in enumerate(self.rbar_grid):
            lines.append(f"{_fmt(float(r))},{self.n0[i]},{_fmt(float(self.values[i].min()))}")
        return "\n".join(lines) + "\n"

    def reference_csv(self) -> str:
        lines = ["n,rbar_ref"]
        lines += [f"{n},{_fmt(v)}" for n, v in self.reference]
        return "\n".join(lines) + "\n"


def itc_table(n_grid, rbar_grid, prior: PriorOdds | None = None,
              quadrature: QuadratureSpec | None = None) -> ItcTable:
    """log10 odds of von Mises vs uniform phases over an (R, N) grid."""
    n_grid = tuple(int(n) for n in n_grid)
    rbar_grid = tuple(float(r) for r in rbar_grid)
    if not n_grid or not rbar_grid:
        raise DomainError("grids must not be empty")
    prior = prior or PriorOdds()
    values = np.empty((len(rbar_grid), len(n_grid)))
    n0 = []
    sorted_grid = sorted(set(n_grid)) == list(n_grid)
    for i, r in enumerate(rbar_grid):
        if sorted_grid:
            best, row = n0_curve(r, n_grid, prior, quadrature)
        else:
            row = [vonmises_logr_from_stats(n, r, prior, quadrature).logr for n in n_grid]
            best = n_grid[int(np.argmin(row))]
        values[i] = row
        n0.append(best)
    values.setflags(write=False)
    return ItcTable(n_grid, rbar_grid, values, tuple(n0))


def write_itc(table: ItcTable, out) -> list:
    """Write the table to ``out`` plus ``*_n0.csv`` and ``*_reference.csv``
    siblings; returns the written paths."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = [out, out.with_name(out.stem + "_n0.csv"),
             out.with_name(out.stem + "_reference.csv")]
    for p, text in zip(paths, (table.table_csv(), table.n0_csv(), table.reference_csv())):
        p.write_text(text, encoding="utf-8", newline="\n")
    return paths


@dataclass(frozen=True)
class ItcConfig:
    n_grid: tuple
    rbar_grid: tuple
    prior_log_odds: float = 0.0
    output: str | None = None
    name: str = "itc"

    @classmethod
    def from_dict(cls, d):
        known = {"name", "itc", "prior_log_odds", "output"}
        for key in d:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
        itc = d.get("itc")
        if not isinstance(itc, dict) or "n_grid" not in itc or "rbar_grid" not in itc:
            raise ConfigError("'itc' needs 'n_grid' and 'rbar_grid'")
        for key in itc:
            if key not in ("n_grid", "rbar_grid"):
                raise ConfigError(f"unknown itc key {key!r}")
        return cls(tuple(itc["n_grid"]), tuple(itc["rbar_grid"]),
                   float(d.get("prior_log_odds", 0.0)), d.get("output"),
                   d.get("name", "itc"))


def load_config(path):
    """Load either a sweep config or an ITC-table config."""
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    if "itc" in d:
        return ItcConfig.from_dict(d)
    return SweepConfig.from_dict(d)
