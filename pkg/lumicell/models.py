"""
Pydantic-модели параметров lumicell.

Здесь живут только валидируемые описания конфигурации (PHY, геометрия сцены,
гиперпараметры GPR, движение, сетка, параметры запуска). Данные с массивами
numpy (сигналы, карты, распределения) описаны dataclass-ами в своих модулях.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FRAME_SYMBOLS = 56

# ---- PHY ----


class PhyConfig(BaseModel):
    """
    Параметры физического уровня: OOK/Manchester, несущая-заглушка и цепочка приёмника.

    Аналоговая часть моделируется на частоте `sample_rate * oversample`, чтобы
    несущая 100 кГц не переносилась спектрально до фильтра.
    """

    model_config = ConfigDict(frozen=True)

    f_mod: float = Field(default=10_000.0, gt=0, description="Тактовая частота модуляции, Гц")
    sample_rate: float = Field(default=48_000.0, gt=0, description="Частота дискретизации АЦП, Гц")
    dummy_carrier_freq: float = Field(default=100_000.0, gt=0, description="Частота несущей-заглушки, Гц")
    lpf_order: int = Field(default=4, ge=1, le=12, description="Порядок ФНЧ Баттерворта")
    lpf_cutoff: float = Field(default=20_000.0, gt=0, description="Частота среза ФНЧ, Гц")
    oversample: int = Field(default=25, ge=1, description="Кратность аналоговой частоты к sample_rate")
    dc_window_frames: float = Field(default=10.0, ge=10.0, description="Окно удаления DC в длительностях кадра")
    fluctuation_ratio: float = Field(default=1.5, gt=1.0, description="Порог max/min амплитуды для clean")
    detect_threshold: float = Field(default=0.7, gt=0.0, lt=1.0, description="Порог нормированной корреляции преамбулы")

    @model_validator(mode="after")
    def _check_invariants(self) -> "PhyConfig":
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def violations(self) -> list[str]:
        """
        Список нарушенных инвариантов (пустой для корректной конфигурации).
        """
        problems: list[str] = []
        if not self.f_mod > 0:
            problems.append("f_mod must be positive")
        if not self.sample_rate > 2 * self.f_mod:
            problems.append("sample_rate must exceed 2*f_mod")
        if not self.dummy_carrier_freq > self.lpf_cutoff > self.f_mod:
            problems.append("require dummy_carrier_freq > lpf_cutoff > f_mod")
        if not self.lpf_cutoff < self.sample_rate / 2:
            problems.append("lpf_cutoff must be below sample_rate/2")
        if self.oversample < 1:
            problems.append("oversample must be >= 1")
        return problems

    @property
    def samples_per_symbol(self) -> float:
        return self.sample_rate / self.f_mod

    @property
    def analog_rate(self) -> float:
        return self.sample_rate * self.oversample

    @property
    def symbol_duration(self) -> float:
        return 1.0 / self.f_mod

    @property
    def packet_duration(self) -> float:
        """Длительность пакета в эфире: 56 символов, 5.6 мс при 10 кГц."""
        return FRAME_SYMBOLS / self.f_mod


# ---- Геометрия сцены ----


def _unit(vector: tuple[float, float, float]) -> tuple[float, float, float]:
    norm = math.sqrt(sum(component * component for component in vector))
    if norm == 0.0 or not math.isfinite(norm):
        raise ValueError("orientation vector must be non-zero and finite")
    return (vector[0] / norm, vector[1] / norm, vector[2] / norm)


class Luminaire(BaseModel):
    """
    Светильник-маяк: идентификатор, положение, ориентация и ламбертовский порядок.
    """

    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0, le=0xFFFF, description="16-битный идентификатор маяка")
    position: tuple[float, float, float]
    normal: tuple[float, float, float] = (0.0, 0.0, -1.0)
    lambertian_order: float = Field(default=1.0, ge=1.0)
    tx_power: float = Field(default=1.0, gt=0)

    @field_validator("normal")
    @classmethod
    def _normalize(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        return _unit(value)


class ReceiverModel(BaseModel):
    """
    Фотоприёмник: положение, ориентация, полуугол поля зрения, площадь и шум.
    """

    model_config = ConfigDict(frozen=True)

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: tuple[float, float, float] = (0.0, 0.0, 1.0)
    fov_half_angle: float = Field(default=math.radians(60.0), gt=0.0, le=math.pi / 2)
    area: float = Field(default=1.0, gt=0)
    noise_sigma: float = Field(default=0.01, ge=0)

    @field_validator("normal")
    @classmethod
    def _normalize(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        return _unit(value)

    def at(self, x: float, y: float) -> "ReceiverModel":
        """Копия приёмника, перенесённая в точку (x, y) той же высоты."""
        return self.model_copy(update={"position": (float(x), float(y), self.position[2])})


# ---- GPR / локализация ----


class GPHyperparams(BaseModel):
    """Гиперпараметры RBF-ядра: σf², l и дисперсия шума σn²."""

    model_config = ConfigDict(frozen=True)

    sigma_f2: float = Field(gt=0)
    length_scale: float = Field(gt=0)
    sigma_n2: float = Field(gt=0)


class MotionParams(BaseModel):
    """Модель движения: СКО гауссова смещения за шаг, м."""

    model_config = ConfigDict(frozen=True)

    sigma_move: float = Field(default=0.1, ge=0)


class GridSpec(BaseModel):
    """
    Равномерная 2D-решётка: начало, шаг и число узлов.

    Растры хранятся построчно: строка = y, столбец = x.
    """

    model_config = ConfigDict(frozen=True)

    origin_x: float = 0.0
    origin_y: float = 0.0
    resolution: float = Field(gt=0)
    nx: int = Field(ge=1)
    ny: int = Field(ge=1)

    @classmethod
    def from_extent(cls, x_min: float, y_min: float, x_max: float, y_max: float, resolution: float) -> "GridSpec":
        """
        Решётка, покрывающая прямоугольник узлами с шагом resolution (обе границы включены).
        """
        if x_max < x_min or y_max < y_min:
            raise ValueError("grid extent must be non-empty")
        nx = int(math.floor((x_max - x_min) / resolution + 1e-9)) + 1
        ny = int(math.floor((y_max - y_min) / resolution + 1e-9)) + 1
        return cls(origin_x=x_min, origin_y=y_min, resolution=resolution, nx=nx, ny=ny)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def xs(self) -> np.ndarray:
        return self.origin_x + np.arange(self.nx) * self.resolution

    def ys(self) -> np.ndarray:
        return self.origin_y + np.arange(self.ny) * self.resolution

    def nodes(self) -> np.ndarray:
        """Координаты всех узлов формы (ny*nx, 2) в построчном порядке."""
        gx, gy = np.meshgrid(self.xs(), self.ys())
        return np.column_stack([gx.ravel(), gy.ravel()])

    def position(self, row: int, col: int) -> tuple[float, float]:
        return (self.origin_x + col * self.resolution, self.origin_y + row * self.resolution)

    def nearest_index(self, point: tuple[float, float]) -> tuple[int, int]:
        """Индекс (row, col) ближайшего узла, с отсечением по границам."""
        col = int(round((point[0] - self.origin_x) / self.resolution))
        row = int(round((point[1] - self.origin_y) / self.resolution))
        return (min(max(row, 0), self.ny - 1), min(max(col, 0), self.nx - 1))

    def bounds(self) -> tuple[float, float, float, float]:
        return (
            self.origin_x,
            self.origin_y,
            self.origin_x + (self.nx - 1) * self.resolution,
            self.origin_y + (self.ny - 1) * self.resolution,
        )


# ---- Запуск CLI ----

MacMode = Literal["synchronized", "asynchronous", "waveform"]


class RunConfig(BaseModel):
    """
    Параметры запуска подкоманды после слияния флагов, файла конфигурации и окружения.

    None означает «взять значение по умолчанию сценария/подкоманды».
    """

    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["phy-roundtrip", "success-rate", "floor-sim", "localize"]
    scenario: Optional[str] = None
    outdir: str = "runs"
    seed: int = Field(default=2017, ge=0)
    threads: int = Field(default=1, ge=1)
    check: bool = False
    trace: bool = False

    n_slots: Optional[int] = Field(default=None, ge=1)
    mode: Optional[MacMode] = None
    transmitters: Optional[int] = Field(default=None, ge=0)
    frames: Optional[int] = Field(default=None, ge=1)
    slot_list: Optional[list[int]] = None
    noise_sigma: Optional[float] = Field(default=None, ge=0)
    fov_deg: Optional[float] = Field(default=None, gt=0, le=90)
    resolution: Optional[float] = Field(default=None, gt=0)
    oversample: Optional[int] = Field(default=None, ge=1)
    lpf_cutoff: Optional[float] = Field(default=None, gt=0)
    count: Optional[int] = Field(default=None, ge=1)
    corrupt: Optional[int] = Field(default=None, ge=0)
    sigma_move: Optional[float] = Field(default=None, ge=0)
    static_cycles: Optional[int] = Field(default=None, ge=1)
    fixed_cycles: Optional[int] = Field(default=None, ge=11)
    light_off: Optional[bool] = None
    fingerprint_repetitions: Optional[int] = Field(default=None, ge=1)
    floor_repetitions: Optional[int] = Field(default=None, ge=1)

    @field_validator("slot_list")
    @classmethod
    def _positive_slots(cls, value: Optional[list[int]]) -> Optional[list[int]]:
        if value is None:
            return value
        if not value or any(n < 1 for n in value):
            raise ValueError("slot_list must be a non-empty list of positive integers")
        return value

    def output_path(self) -> str:
        return f"{self.outdir}/{self.subcommand}"


__all__ = [
    "FRAME_SYMBOLS",
    "GPHyperparams",
    "GridSpec",
    "Luminaire",
    "MacMode",
    "MotionParams",
    "PhyConfig",
    "ReceiverModel",
    "RunConfig",
]
