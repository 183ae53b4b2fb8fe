"""
Локализация: сеточный байесовский фильтр и метрики ошибок.
"""

from .bayes import (
    BayesFilter,
    BeliefGrid,
    Estimate,
    Observation,
    Reading,
    init_belief,
    likelihood,
    likelihood_raster,
    log_likelihood_raster,
    map_estimate,
    predict_step,
    update_step,
)
from .metrics import ErrorReport, error_metrics

__all__ = [
    "BayesFilter",
    "BeliefGrid",
    "ErrorReport",
    "Estimate",
    "Observation",
    "Reading",
    "error_metrics",
    "init_belief",
    "likelihood",
    "likelihood_raster",
    "log_likelihood_raster",
    "map_estimate",
    "predict_step",
    "update_step",
]
