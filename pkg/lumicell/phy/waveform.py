"""
Синтез OOK-сигналов: модуляция кадра, несущая-заглушка и метрика мерцания.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from ..exceptions import PhyConfigError
from ..models import FRAME_SYMBOLS, PhyConfig
from .frame import SymbolFrame

Coupling = Literal["unipolar", "bipolar"]


@dataclass(frozen=True)
class Waveform:
    """
    Дискретный сигнал.

    `scale` связывает отсчёты с физической амплитудой (samples = physical * scale);
    `start_sample` задаёт положение первого отсчёта на общей оси времени.
    """

    samples: np.ndarray
    sample_rate: float
    coupling: Coupling = "unipolar"
    scale: float = 1.0
    start_sample: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.samples.ndim != 1:
            raise ValueError("waveform samples must be one-dimensional")
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    @property
    def end_sample(self) -> int:
        return self.start_sample + len(self)


def check_phy_config(cfg: PhyConfig, *, sample_rate: Optional[float] = None) -> None:
    """
    Проверить инварианты PhyConfig и применимость к частоте сигнала.

    Raises:
        PhyConfigError: нарушен инвариант или sample_rate <= 2*f_mod
    """
    problems = cfg.violations()
    if sample_rate is not None and not sample_rate > 2 * cfg.f_mod:
        problems.append(f"waveform sample_rate {sample_rate} must exceed 2*f_mod")
    if problems:
        raise PhyConfigError("; ".join(problems), details={"problems": problems})


def symbol_boundaries(n_symbols: int, samples_per_symbol: float) -> np.ndarray:
    """Границы символов в отсчётах: floor(k*sps + 0.5), k = 0..n."""
    k = np.arange(n_symbols + 1, dtype=float)
    return np.floor(k * samples_per_symbol + 0.5).astype(np.int64)


def modulate_symbols(
    symbols: Sequence[int],
    cfg: PhyConfig,
    amplitude: float,
    *,
    sample_rate: Optional[float] = None,
) -> Waveform:
    """
    Удерживать каждый уровень sample_rate/f_mod отсчётов (границы округляются до ближайшего).
    """
    rate = float(sample_rate or cfg.sample_rate)
    check_phy_config(cfg, sample_rate=rate)
    if not amplitude > 0:
        raise ValueError("amplitude must be positive")
    levels = np.asarray(symbols, dtype=float)
    bounds = symbol_boundaries(len(levels), rate / cfg.f_mod)
    samples = np.repeat(levels * amplitude, np.diff(bounds))
    return Waveform(samples=samples, sample_rate=rate, coupling="unipolar")


def modulate(
    sf: SymbolFrame,
    cfg: PhyConfig,
    amplitude: float,
    *,
    sample_rate: Optional[float] = None,
) -> Waveform:
    """
    Однополярный сигнал кадра: high = amplitude, low = 0.

    Args:
        sf: Кадр из 56 символов
        cfg: Параметры PHY
        amplitude: Амплитуда высокого уровня (> 0)
        sample_rate: Частота синтеза; по умолчанию cfg.sample_rate

    Raises:
        PhyConfigError: cfg нарушает инварианты
    """
    return modulate_symbols(sf.symbols, cfg, amplitude, sample_rate=sample_rate)


def dummy_carrier(
    duration_samples: int,
    cfg: PhyConfig,
    amplitude: float,
    *,
    sample_rate: Optional[float] = None,
    start_sample: int = 0,
) -> Waveform:
    """
    Меандр "01" на dummy_carrier_freq со скважностью 50 %.

    Отсчёт n низкий, если фаза (n * f_c / fs) mod 1 < 0.5; так несущая остаётся
    непрерывной при синтезе по кускам с разным start_sample.
    """
    if duration_samples < 0:
        raise ValueError("duration_samples must be non-negative")
    rate = float(sample_rate or cfg.sample_rate)
    n = np.arange(start_sample, start_sample + duration_samples, dtype=np.float64)
    phase = np.mod(n * cfg.dummy_carrier_freq, rate)
    samples = np.where(phase >= rate / 2.0, amplitude, 0.0)
    return Waveform(samples=samples, sample_rate=rate, coupling="unipolar", start_sample=start_sample)


def flicker_index(w: Waveform, cfg: PhyConfig) -> float:
    """
    Максимальное относительное отклонение средней яркости в окнах длиной в кадр.

    0 для идеально ровной яркости; тёмные паузы между пакетами дают большие значения.
    """
    window = int(round(FRAME_SYMBOLS * w.sample_rate / cfg.f_mod))
    n_windows = len(w) // window if window > 0 else 0
    if n_windows == 0:
        return 0.0
    blocks = w.samples[: n_windows * window].reshape(n_windows, window).mean(axis=1)
    overall = float(blocks.mean())
    if math.isclose(overall, 0.0, abs_tol=1e-15):
        return 0.0
    return float(np.max(np.abs(blocks - overall)) / abs(overall))


__all__ = [
    "Coupling",
    "Waveform",
    "check_phy_config",
    "dummy_carrier",
    "flicker_index",
    "modulate",
    "modulate_symbols",
    "symbol_boundaries",
]
