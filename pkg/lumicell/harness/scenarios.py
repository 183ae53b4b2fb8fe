"""
Описания сценариев и две канонические сцены: испытательный стенд 3×3 м и этаж 30×30 м.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..channel.optical import normalized_tx_power, rss_model
from ..mac.bfsa import DEFAULT_SLOT_DURATION
from ..models import GridSpec, Luminaire, MacMode, PhyConfig, ReceiverModel

logger = logging.getLogger(__name__)

TESTBED_SIDE = 3.0
TESTBED_HEIGHT = 2.37
TESTBED_LIGHT_OFF_ID = 4
FLOOR_SIDE = 30.0
FLOOR_HEIGHT = 2.5
FLOOR_PITCH = 3.0
FLOOR_LIGHTS_PER_SIDE = 9
FLOOR_EVAL_PER_SIDE = 40
DEFAULT_TOP_K = 4


class MacSettings(BaseModel):
    """
    Параметры MAC сценария.

    `mode`: synchronized / asynchronous: интервальная модель коллизий;
    waveform: синтез сигналов и демодуляция, фазы выровнены, если не задано random_phase.
    """

    model_config = ConfigDict(frozen=True)

    n_slots: int = Field(default=20, ge=1)
    mode: MacMode = "synchronized"
    slot_duration: float = Field(default=DEFAULT_SLOT_DURATION, gt=0)
    random_phase: bool = False

    @property
    def phases_random(self) -> bool:
        return self.mode == "asynchronous" or self.random_phase


class Scenario(BaseModel):
    """Полное описание прогона: сцена, PHY, MAC, точки оценки и отпечатков."""

    model_config = ConfigDict(frozen=True)

    name: str
    luminaires: list[Luminaire] = Field(min_length=1)
    receiver: ReceiverModel = ReceiverModel()
    phy: PhyConfig = PhyConfig()
    mac: MacSettings = MacSettings()
    footprint: tuple[float, float, float, float]
    eval_points: list[tuple[float, float]] = Field(min_length=1)
    fingerprint_grid: Optional[GridSpec] = None
    map_grid: Optional[GridSpec] = None
    repetitions: int = Field(default=20, ge=1, description="Кадров MAC на точку оценки")
    fingerprint_repetitions: int = Field(default=10, ge=1, description="Кадров MAC на точку отпечатка")
    top_k: int = Field(default=DEFAULT_TOP_K, ge=1)
    seed: int = Field(default=2017, ge=0)

    @model_validator(mode="after")
    def _check_scene(self) -> "Scenario":
        ids = [lum.id for lum in self.luminaires]
        if len(set(ids)) != len(ids):
            raise ValueError("luminaire ids must be distinct")
        x_min, y_min, x_max, y_max = self.footprint
        if not (x_min < x_max and y_min < y_max):
            raise ValueError("footprint must be a non-empty rectangle")
        for x, y in self.eval_points:
            if not (x_min <= x <= x_max and y_min <= y <= y_max):
                raise ValueError(f"eval point ({x}, {y}) lies outside the scene footprint")
        if self.mac.slot_duration < self.phy.packet_duration * (1 - 1e-9):
            raise ValueError("slot_duration must fit one packet")
        return self

    @property
    def luminaire_ids(self) -> list[int]:
        return [lum.id for lum in self.luminaires]

    def without_luminaire(self, beacon_id: int) -> "Scenario":
        """Копия сценария с выключенным светильником."""
        remaining = [lum for lum in self.luminaires if lum.id != beacon_id]
        if len(remaining) == len(self.luminaires):
            raise ValueError(f"scenario has no luminaire {beacon_id}")
        return self.model_copy(update={"luminaires": remaining, "name": f"{self.name}-without-{beacon_id}"})


def _grid_points(start: float, step: float, count: int) -> list[float]:
    return [round(start + i * step, 10) for i in range(count)]


def canonical_testbed(light_off: bool = False, *, n_slots: int = 20, seed: int = 2017) -> Scenario:
    """
    Стенд 3×3 м: 4 светильника в углах на высоте 2.37 м, отпечатки 6×6 с шагом 0.4 м
    по центру, 25 точек оценки сеткой 5×5 на [0.3, 2.7]², карты с шагом 0.04 м.

    light_off=True выключает светильник #4 (проверка устойчивости).
    """
    power = normalized_tx_power(TESTBED_HEIGHT)
    corners = [(0.0, 0.0), (TESTBED_SIDE, 0.0), (0.0, TESTBED_SIDE), (TESTBED_SIDE, TESTBED_SIDE)]
    luminaires = [
        Luminaire(id=index + 1, position=(x, y, TESTBED_HEIGHT), tx_power=power) for index, (x, y) in enumerate(corners)
    ]
    # 6 узлов по 0.4 м занимают 2.0 м; по центру стенда это [0.5, 2.5].
    fp_start = (TESTBED_SIDE - 5 * 0.4) / 2.0
    eval_axis = _grid_points(0.3, 0.6, 5)
    scenario = Scenario(
        name="testbed",
        luminaires=luminaires,
        receiver=ReceiverModel(position=(0.0, 0.0, 0.0)),
        mac=MacSettings(n_slots=n_slots, mode="synchronized"),
        footprint=(0.0, 0.0, TESTBED_SIDE, TESTBED_SIDE),
        eval_points=[(x, y) for y in eval_axis for x in eval_axis],
        fingerprint_grid=GridSpec(origin_x=fp_start, origin_y=fp_start, resolution=0.4, nx=6, ny=6),
        map_grid=GridSpec.from_extent(0.0, 0.0, TESTBED_SIDE, TESTBED_SIDE, 0.04),
        repetitions=1,
        fingerprint_repetitions=10,
        seed=seed,
    )
    return scenario.without_luminaire(TESTBED_LIGHT_OFF_ID) if light_off else scenario


def canonical_floor(n_slots: int = 20, *, seed: int = 2017) -> Scenario:
    """
    Этаж 30×30 м: 81 светильник с шагом 3 м на высоте 2.5 м, сетка 40×40 точек оценки,
    20 кадров MAC на точку, waveform-режим с выровненными слотами.
    """
    power = normalized_tx_power(FLOOR_HEIGHT)
    axis = _grid_points(FLOOR_PITCH, FLOOR_PITCH, FLOOR_LIGHTS_PER_SIDE)
    luminaires = [
        Luminaire(id=row * FLOOR_LIGHTS_PER_SIDE + col + 1, position=(x, y, FLOOR_HEIGHT), tx_power=power)
        for row, y in enumerate(axis)
        for col, x in enumerate(axis)
    ]
    step = FLOOR_SIDE / FLOOR_EVAL_PER_SIDE
    eval_axis = _grid_points(step / 2.0, step, FLOOR_EVAL_PER_SIDE)
    return Scenario(
        name="floor",
        luminaires=luminaires,
        receiver=ReceiverModel(position=(0.0, 0.0, 0.0)),
        mac=MacSettings(n_slots=n_slots, mode="waveform"),
        footprint=(0.0, 0.0, FLOOR_SIDE, FLOOR_SIDE),
        eval_points=[(x, y) for y in eval_axis for x in eval_axis],
        repetitions=20,
        seed=seed,
    )


def visible_luminaires(scenario: Scenario, point: Sequence[float]) -> list[tuple[Luminaire, float]]:
    """Светильники с ненулевым усилением в точке и их ожидаемый RSS, в порядке id."""
    rx = scenario.receiver.at(point[0], point[1])
    visible: list[tuple[Luminaire, float]] = []
    for lum in sorted(scenario.luminaires, key=lambda item: item.id):
        rss = rss_model(lum, rx)
        if rss > 0.0:
            visible.append((lum, rss))
    return visible


def top_k_beacons(scenario: Scenario, point: Sequence[float], k: int) -> list[int]:
    """
    k идентификаторов с наибольшим rss_model в точке; при равенстве: меньший id.

    Если в поле зрения меньше k светильников, возвращаются все с предупреждением.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    # Округление убирает расхождения в последнем ulp у симметричных точек.
    ranked = sorted(visible_luminaires(scenario, point), key=lambda item: (-round(item[1], 12), item[0].id))
    if len(ranked) < k:
        logger.warning(
            "only %d luminaire(s) in field of view at (%.3f, %.3f), requested top %d",
            len(ranked),
            point[0],
            point[1],
            k,
        )
    return [lum.id for lum, _ in ranked[:k]]


def customize(
    scenario: Scenario,
    *,
    n_slots: Optional[int] = None,
    mode: Optional[MacMode] = None,
    noise_sigma: Optional[float] = None,
    fov_deg: Optional[float] = None,
    repetitions: Optional[int] = None,
    fingerprint_repetitions: Optional[int] = None,
    resolution: Optional[float] = None,
    oversample: Optional[int] = None,
    lpf_cutoff: Optional[float] = None,
    seed: Optional[int] = None,
) -> Scenario:
    """
    Применить переопределения запуска; None оставляет значение сценария.

    Вложенные модели пересобираются с валидацией, чтобы переопределения проверялись до прогона.
    """
    mac_update = {key: value for key, value in {"n_slots": n_slots, "mode": mode}.items() if value is not None}
    rx_update: dict[str, float] = {}
    if noise_sigma is not None:
        rx_update["noise_sigma"] = noise_sigma
    if fov_deg is not None:
        rx_update["fov_half_angle"] = math.radians(fov_deg)
    phy_update = {key: value for key, value in {"oversample": oversample, "lpf_cutoff": lpf_cutoff}.items() if value is not None}

    update: dict[str, object] = {
        "mac": MacSettings(**{**scenario.mac.model_dump(), **mac_update}),
        "receiver": ReceiverModel(**{**scenario.receiver.model_dump(), **rx_update}),
        "phy": PhyConfig(**{**scenario.phy.model_dump(), **phy_update}),
    }
    if repetitions is not None:
        update["repetitions"] = repetitions
    if fingerprint_repetitions is not None:
        update["fingerprint_repetitions"] = fingerprint_repetitions
    if seed is not None:
        update["seed"] = seed
    if resolution is not None and scenario.map_grid is not None:
        x_min, y_min, x_max, y_max = scenario.map_grid.bounds()
        update["map_grid"] = GridSpec.from_extent(x_min, y_min, x_max, y_max, resolution)
    return Scenario.model_validate({**dict(scenario), **update})


BUILTIN_SCENARIOS = ("testbed", "testbed-light-off", "floor")


def builtin_scenario(name: str, *, n_slots: Optional[int] = None, seed: int = 2017) -> Scenario:
    """
    Сценарий по имени: testbed, testbed-light-off, floor.
    """
    if name == "testbed":
        return canonical_testbed(n_slots=n_slots or 20, seed=seed)
    if name == "testbed-light-off":
        return canonical_testbed(light_off=True, n_slots=n_slots or 20, seed=seed)
    if name == "floor":
        return canonical_floor(n_slots or 20, seed=seed)
    raise ValueError(f"unknown scenario '{name}', expected one of {', '.join(BUILTIN_SCENARIOS)}")


__all__ = [
    "BUILTIN_SCENARIOS",
    "MacSettings",
    "Scenario",
    "builtin_scenario",
    "canonical_floor",
    "canonical_testbed",
    "customize",
    "top_k_beacons",
    "visible_luminaires",
]
