"""
Регрессия гауссовского процесса по отпечаткам RSS и карты интенсивности.
"""

from .maps import IntensityMapSet, build_maps, rasterize
from .model import (
    BeaconGP,
    FingerprintSet,
    GPModel,
    default_candidate_grid,
    default_hyperparams,
    fit,
    kernel,
    log_marginal_likelihood,
    predict,
    predict_many,
    select_hyperparams,
)

__all__ = [
    "BeaconGP",
    "FingerprintSet",
    "GPModel",
    "IntensityMapSet",
    "build_maps",
    "default_candidate_grid",
    "default_hyperparams",
    "fit",
    "kernel",
    "log_marginal_likelihood",
    "predict",
    "predict_many",
    "rasterize",
    "select_hyperparams",
]
