"""Bayesian model-comparison measures of dependence between two systems.

The measure of dependence between x and y in a dataset is the posterior
log odds of a dependence model H1 against an independence model H0.  See
:mod:`bayesdep.core` for the measure family, :mod:`bayesdep.models` for the
comparators, :mod:`bayesdep.datagen` for simulation scenarios and
:mod:`bayesdep.experiments` for replicated sweeps.
"""
from .core import (
    VIEWS,
    DependenceMeasure,
    LogBayesFactor,
    PairedDataset,
    PriorOdds,
    combine,
    to_view,
)
from .errors import (
    AccuracyError,
    BayesDepError,
    ConfigError,
    DivergenceError,
    DomainError,
    EvaluationError,
    FitError,
    SweepError,
)
from .models import *  # noqa: F401,F403

__version__ = "0.1.0"
