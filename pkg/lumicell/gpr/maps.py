"""
Карты интенсивности: растры апостериорного среднего и дисперсии по каждому маяку.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..models import GPHyperparams, GridSpec
from .model import FingerprintSet, GPModel, fit, predict_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntensityMapSet:
    """
    Растры на общей решётке: среднее, дисперсия наблюдения (с σn²) и латентная дисперсия.
    """

    grid: GridSpec
    mean: Mapping[int, np.ndarray]
    variance: Mapping[int, np.ndarray]
    latent_variance: Mapping[int, np.ndarray]
    hp: GPHyperparams

    def __post_init__(self) -> None:
        if set(self.mean) != set(self.variance) or set(self.mean) != set(self.latent_variance):
            raise ValueError("mean and variance rasters must cover the same beacons")
        for beacon_id in self.mean:
            for raster in (self.mean[beacon_id], self.variance[beacon_id], self.latent_variance[beacon_id]):
                if raster.shape != self.grid.shape:
                    raise ValueError(f"raster of beacon {beacon_id} does not match grid {self.grid.shape}")
            if not np.all(self.variance[beacon_id] > 0):
                raise ValueError(f"variance raster of beacon {beacon_id} must be strictly positive")

    @property
    def beacon_ids(self) -> list[int]:
        return sorted(self.mean)

    def __contains__(self, beacon_id: int) -> bool:
        return beacon_id in self.mean


def _warn_on_extrapolation(fp: FingerprintSet, grid: GridSpec) -> None:
    x_min, y_min = fp.positions.min(axis=0)
    x_max, y_max = fp.positions.max(axis=0)
    gx_min, gy_min, gx_max, gy_max = grid.bounds()
    if gx_min < x_min or gy_min < y_min or gx_max > x_max or gy_max > y_max:
        logger.warning(
            "map grid [%.2f,%.2f]x[%.2f,%.2f] extends beyond fingerprint hull [%.2f,%.2f]x[%.2f,%.2f]; "
            "border values are extrapolated",
            gx_min,
            gx_max,
            gy_min,
            gy_max,
            x_min,
            x_max,
            y_min,
            y_max,
        )


def rasterize(model: GPModel, grid: GridSpec) -> IntensityMapSet:
    """Вычислить predict во всех узлах решётки для каждого маяка."""
    nodes = grid.nodes()
    mean: dict[int, np.ndarray] = {}
    variance: dict[int, np.ndarray] = {}
    latent: dict[int, np.ndarray] = {}
    for beacon_id in model.beacon_ids:
        prediction = predict_many(model[beacon_id], nodes)
        mean[beacon_id] = prediction.mean.reshape(grid.shape)
        variance[beacon_id] = prediction.observation_variance.reshape(grid.shape)
        latent[beacon_id] = prediction.latent_variance.reshape(grid.shape)
    return IntensityMapSet(grid=grid, mean=mean, variance=variance, latent_variance=latent, hp=model.hp)


def build_maps(fp: FingerprintSet, hp: GPHyperparams, grid: GridSpec) -> IntensityMapSet:
    """
    Обучить GPR по отпечаткам и растеризовать карты на решётке.

    Выход решётки за пределы отпечатков допускается с предупреждением.
    """
    _warn_on_extrapolation(fp, grid)
    return rasterize(fit(fp, hp), grid)


__all__ = ["IntensityMapSet", "build_maps", "rasterize"]
