"""
Сеточный байесовский фильтр по картам интенсивности.

Правдоподобие: произведение гауссовых плотностей по принятым чистым маякам;
шаг предсказания: диффузия гауссовым ядром (данных одометрии нет).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from ..exceptions import InconsistentObservationError, UnknownBeaconError
from ..gpr.maps import IntensityMapSet
from ..models import GridSpec, MotionParams

logger = logging.getLogger(__name__)

UNDERFLOW_MASS = 1e-300
KERNEL_TRUNCATE = 4.0
_MASS_TOL = 1e-9


@dataclass(frozen=True)
class Reading:
    rss: float
    clean: bool = True

    def __post_init__(self) -> None:
        if not self.rss >= 0:
            raise ValueError("rss must be non-negative")


@dataclass(frozen=True)
class Observation:
    """Один цикл наблюдения: время и RSS по идентификаторам маяков."""

    t: float
    readings: Mapping[int, Reading] = field(default_factory=dict)

    def clean_readings(self) -> dict[int, float]:
        return {beacon_id: reading.rss for beacon_id, reading in sorted(self.readings.items()) if reading.clean}


@dataclass(frozen=True)
class BeliefGrid:
    """Распределение положения на решётке карт: p >= 0, сумма 1."""

    grid: GridSpec
    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        if p.shape != self.grid.shape:
            raise ValueError(f"belief shape {p.shape} does not match grid {self.grid.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("belief must be finite and non-negative")
        if abs(float(p.sum()) - 1.0) > _MASS_TOL:
            raise ValueError("belief must sum to 1")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Estimate:
    position: tuple[float, float]
    mass: float


def init_belief(grid: GridSpec) -> BeliefGrid:
    """Равномерное априорное распределение."""
    return BeliefGrid(grid=grid, p=np.full(grid.shape, 1.0 / grid.size))


def _check_beacons(maps: IntensityMapSet, obs: Observation) -> None:
    unknown = sorted(beacon_id for beacon_id in obs.readings if beacon_id not in maps)
    if unknown:
        raise UnknownBeaconError(
            f"observation contains beacons without maps: {unknown}",
            details={"beacon_ids": unknown},
        )


def log_likelihood_raster(maps: IntensityMapSet, obs: Observation) -> np.ndarray:
    """Σ log N(rss; μ, σ²) по чистым маякам в каждом узле; нули без наблюдений."""
    _check_beacons(maps, obs)
    total = np.zeros(maps.grid.shape)
    for beacon_id, rss in obs.clean_readings().items():
        mu = maps.mean[beacon_id]
        var = maps.variance[beacon_id]
        total += -0.5 * np.log(2.0 * math.pi * var) - (rss - mu) ** 2 / (2.0 * var)
    return total


def likelihood_raster(maps: IntensityMapSet, obs: Observation) -> np.ndarray:
    return np.exp(log_likelihood_raster(maps, obs))


def likelihood(maps: IntensityMapSet, obs: Observation, cell: Sequence[float]) -> float:
    """
    Плотность p(y | x) в узле решётки, ближайшем к точке cell.

    Raises:
        UnknownBeaconError: в наблюдении есть маяк без карты
    """
    _check_beacons(maps, obs)
    row, col = maps.grid.nearest_index((float(cell[0]), float(cell[1])))
    log_density = 0.0
    for beacon_id, rss in obs.clean_readings().items():
        mu = float(maps.mean[beacon_id][row, col])
        var = float(maps.variance[beacon_id][row, col])
        log_density += -0.5 * math.log(2.0 * math.pi * var) - (rss - mu) ** 2 / (2.0 * var)
    return math.exp(log_density)


def predict_step(belief: BeliefGrid, motion: MotionParams) -> BeliefGrid:
    """
    Свёртка с изотропным гауссовым ядром σ = sigma_move / resolution клеток, усечённым на 4σ.
    """
    if motion.sigma_move == 0:
        return belief
    sigma_cells = motion.sigma_move / belief.grid.resolution
    spread = gaussian_filter(belief.p, sigma=sigma_cells, mode="constant", cval=0.0, truncate=KERNEL_TRUNCATE)
    spread = np.clip(spread, 0.0, None)
    total = float(spread.sum())
    if total <= 0:
        return belief
    return BeliefGrid(grid=belief.grid, p=spread / total)


def update_step(belief: BeliefGrid, maps: IntensityMapSet, obs: Observation) -> BeliefGrid:
    """
    Апостериорное распределение ∝ априорное × правдоподобие.

    При исчезающей массе (< 1e-300) пересчёт в лог-пространстве с вычитанием максимума.

    Raises:
        UnknownBeaconError: в наблюдении есть маяк без карты
        InconsistentObservationError: апостериорное распределение нулевое
    """
    if maps.grid != belief.grid:
        raise ValueError("belief and maps must share one grid")
    log_lik = log_likelihood_raster(maps, obs)
    with np.errstate(over="ignore", under="ignore"):
        posterior = belief.p * np.exp(log_lik)
    total = float(posterior.sum())
    if total < UNDERFLOW_MASS or not math.isfinite(total):
        logger.debug("update_step: mass %.3g out of range, switching to log space", total)
        with np.errstate(divide="ignore"):
            log_post = np.log(belief.p) + log_lik
        peak = float(log_post.max())
        if not math.isfinite(peak):
            raise InconsistentObservationError(
                "observation inconsistent with map",
                details={"t": obs.t, "beacon_ids": sorted(obs.readings)},
            )
        posterior = np.exp(log_post - peak)
        total = float(posterior.sum())
    return BeliefGrid(grid=belief.grid, p=posterior / total)


def map_estimate(belief: BeliefGrid) -> Estimate:
    """Узел с максимальной вероятностью; при равенстве: первый в построчном порядке."""
    flat = int(np.argmax(belief.p))
    row, col = divmod(flat, belief.grid.nx)
    return Estimate(position=belief.grid.position(row, col), mass=float(belief.p[row, col]))


class BayesFilter:
    """
    Рекурсивный фильтр с единственным владельцем состояния: predict + update + MAP на шаг.
    """

    def __init__(self, maps: IntensityMapSet, motion: Optional[MotionParams] = None) -> None:
        self.maps = maps
        self.motion = motion or MotionParams()
        self.belief = init_belief(maps.grid)

    def reset(self) -> None:
        self.belief = init_belief(self.maps.grid)

    def step(self, obs: Observation) -> Estimate:
        self.belief = update_step(predict_step(self.belief, self.motion), self.maps, obs)
        return map_estimate(self.belief)


__all__ = [
    "BayesFilter",
    "BeliefGrid",
    "Estimate",
    "Observation",
    "Reading",
    "init_belief",
    "likelihood",
    "likelihood_raster",
    "log_likelihood_raster",
    "map_estimate",
    "predict_step",
    "update_step",
]
