"""
Цепочка приёмника: удаление DC (интегратор ошибки TIA), ФНЧ Баттерворта,
дискретизация АЦП и нормировка пика в [-1, 1].
"""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
from scipy import signal

from ..exceptions import PhyConfigError
from ..models import FRAME_SYMBOLS, PhyConfig
from .waveform import Waveform, check_phy_config

logger = logging.getLogger(__name__)

# Относительный порог, ниже которого выход считается нулевым (постоянный вход).
_SILENCE_RATIO = 1e-9


@lru_cache(maxsize=32)
def butterworth_sos(order: int, cutoff: float, sample_rate: float) -> np.ndarray:
    """Коэффициенты ФНЧ в виде секций второго порядка."""
    return signal.butter(order, cutoff, btype="low", fs=sample_rate, output="sos")


def running_mean(x: np.ndarray, window: int) -> np.ndarray:
    """
    Центрированное скользящее среднее с усечённым окном на краях.

    Сигнал короче окна заменяется глобальным средним.
    """
    n = x.shape[0]
    if n == 0:
        return x.copy()
    if window >= n:
        return np.full(n, x.mean())
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(n)
    lo = np.clip(idx - half, 0, n)
    hi = np.clip(idx - half + window, 0, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def decimation_factor(input_rate: float, output_rate: float) -> int:
    """
    Целый коэффициент децимации до частоты АЦП; 1, если частоты совпадают или вход медленнее.
    """
    if input_rate <= output_rate:
        return 1
    ratio = input_rate / output_rate
    factor = int(round(ratio))
    if abs(ratio - factor) > 1e-9 * ratio:
        raise PhyConfigError(
            f"input rate {input_rate} is not an integer multiple of sample_rate {output_rate}",
            details={"input_rate": input_rate, "sample_rate": output_rate},
        )
    return factor


def receiver_chain(w: Waveform, cfg: PhyConfig) -> Waveform:
    """
    Преобразовать суммарную оптическую интенсивность в биполярный сигнал АЦП.

    Шаги: вычитание скользящего среднего (окно dc_window_frames кадров), ФНЧ
    lpf_order на lpf_cutoff, децимация до cfg.sample_rate (если вход на кратной
    аналоговой частоте), нормировка пика. Коэффициент нормировки сохраняется в `scale`.

    ФНЧ подавляет несущую-заглушку только если вход синтезирован на analog_rate.
    Несущая 100 кГц, уже дискретизованная на 48 кГц, превращается в меандр 4 кГц
    внутри полосы пропускания, и фильтр после АЦП её не уберёт.
    """
    check_phy_config(cfg, sample_rate=w.sample_rate)
    if not cfg.lpf_cutoff < w.sample_rate / 2:
        raise PhyConfigError(
            f"lpf_cutoff {cfg.lpf_cutoff} must be below Nyquist of input rate {w.sample_rate}",
            details={"lpf_cutoff": cfg.lpf_cutoff, "sample_rate": w.sample_rate},
        )
    factor = decimation_factor(w.sample_rate, cfg.sample_rate)
    out_rate = w.sample_rate / factor
    if len(w) == 0:
        return Waveform(samples=np.zeros(0), sample_rate=out_rate, coupling="bipolar", start_sample=w.start_sample // factor)

    x = w.samples
    window = int(round(cfg.dc_window_frames * FRAME_SYMBOLS * w.sample_rate / cfg.f_mod))
    centered = x - running_mean(x, window)
    filtered = signal.sosfilt(butterworth_sos(cfg.lpf_order, float(cfg.lpf_cutoff), float(w.sample_rate)), centered)
    sampled = filtered[::factor]

    peak = float(np.max(np.abs(sampled))) if sampled.size else 0.0
    reference = float(np.max(np.abs(x)))
    if peak <= _SILENCE_RATIO * max(reference, np.finfo(float).tiny):
        logger.debug("receiver_chain: flat input, returning silence")
        return Waveform(
            samples=np.zeros(sampled.shape[0]),
            sample_rate=out_rate,
            coupling="bipolar",
            scale=w.scale,
            start_sample=w.start_sample // factor,
        )
    return Waveform(
        samples=sampled / peak,
        sample_rate=out_rate,
        coupling="bipolar",
        scale=w.scale / peak,
        start_sample=w.start_sample // factor,
    )


__all__ = ["butterworth_sos", "decimation_factor", "receiver_chain", "running_mean"]
