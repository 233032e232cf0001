"""The comparator abstraction shared by every H0-vs-H1 construction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..core import LogBayesFactor, PriorOdds, DependenceMeasure, combine


@dataclass(frozen=True)
class ModelComparator:
    """A pair of competing models reduced to a log Bayes factor evaluator.

    Attributes
    ----------
    name : str
    dim_h0, dim_h1 : int
        Number of free parameters under H0 and H1.
    symmetric_xy : bool
        Whether exchanging x and y leaves the evaluator unchanged.
    evaluator : callable
        ``evaluator(data) -> LogBayesFactor``.
    approximate : bool
        The evaluator drops an O(1) remainder (BIC-type comparators).
    params : dict
        Parameters the comparator was built with, for provenance.
    """

    name: str
    dim_h0: int
    dim_h1: int
    symmetric_xy: bool
    evaluator: Callable[[Any], LogBayesFactor]
    approximate: bool = False
    params: dict = field(default_factory=dict)

    def __call__(self, data) -> LogBayesFactor:
        return self.evaluator(data)

    def measure(self, data, prior: PriorOdds | None = None) -> DependenceMeasure:
        return combine(prior or PriorOdds(), self.evaluator(data))
