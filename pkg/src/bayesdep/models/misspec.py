"""Empirical check of behaviour under a generative model that is neither H0
nor H1: the log odds should drift toward whichever model is closer in
Kullback-Leibler divergence, linearly in N."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .base import ModelComparator


@dataclass(frozen=True)
class TrendReport:
    n_grid: tuple
    medians: tuple
    slope: float

    @property
    def sign(self) -> int:
        return int(np.sign(self.slope))


def misspecification_trend(generator, comparator: ModelComparator, n_grid,
                           replications: int, seed: int) -> TrendReport:
    """Median log odds per sample size and the sign of their trend.

    Parameters
    ----------
    generator : callable
        ``generator(n, seed) -> PairedDataset`` for the true model.
    comparator : ModelComparator
    n_grid : sequence of int
    replications : int
    seed : int
        Replication r uses ``derive_seed(seed, r)``; the same seed is used at
        every N so datasets grow rather than being redrawn.
    """
    from ..datagen import derive_seed

    n_grid = tuple(int(n) for n in n_grid)
    if len(n_grid) < 2:
        raise DomainError("need at least two sample sizes")
    seeds = [derive_seed(seed, r) for r in range(replications)]
    medians = []
    for n in n_grid:
        values = [comparator(generator(n, s)).value for s in seeds]
        medians.append(float(np.median(values)))
    slope = float(np.polyfit(np.asarray(n_grid, dtype=float), medians, 1)[0])
    return TrendReport(n_grid, tuple(medians), slope)
