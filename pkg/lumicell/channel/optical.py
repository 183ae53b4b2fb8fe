"""
Оптический канал прямой видимости: ламбертовское усиление, RSS и суперпозиция сигналов.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..exceptions import DegenerateGeometryError, SampleRateMismatchError
from ..models import Luminaire, ReceiverModel
from ..phy.waveform import Waveform


def channel_gain(lum: Luminaire, rx: ReceiverModel) -> float:
    """
    Усиление по постоянному току: (m+1)·A·cos^m(φ)·cos(ψ) / (2π·d²) при ψ <= FOV, иначе 0.

    Raises:
        DegenerateGeometryError: светильник и приёмник совпадают
    """
    d = np.subtract(rx.position, lum.position)
    dist2 = float(np.dot(d, d))
    if dist2 == 0.0:
        raise DegenerateGeometryError(
            "degenerate geometry: luminaire and receiver coincide",
            details={"beacon_id": lum.id, "position": list(lum.position)},
        )
    dist = math.sqrt(dist2)
    cos_phi = float(np.dot(lum.normal, d)) / dist
    cos_psi = -float(np.dot(rx.normal, d)) / dist
    if cos_phi <= 0.0 or cos_psi <= 0.0:
        return 0.0
    if math.acos(min(cos_psi, 1.0)) > rx.fov_half_angle:
        return 0.0
    m = lum.lambertian_order
    return (m + 1.0) * rx.area * cos_phi**m * cos_psi / (2.0 * math.pi * dist2)


def rss_model(lum: Luminaire, rx: ReceiverModel) -> float:
    """Ожидаемый RSS без шума: tx_power × channel_gain."""
    return lum.tx_power * channel_gain(lum, rx)


def normalized_tx_power(height: float, lambertian_order: float = 1.0, area: float = 1.0) -> float:
    """Мощность, при которой RSS строго под светильником на расстоянии height равен 1."""
    return 2.0 * math.pi * height * height / ((lambertian_order + 1.0) * area)


def gain_field(luminaires: Sequence[Luminaire], rx: ReceiverModel, points: np.ndarray) -> np.ndarray:
    """
    Матрица усилений формы (len(points), len(luminaires)) для приёмника в точках (x, y).
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    gains = np.zeros((points.shape[0], len(luminaires)))
    for i, (x, y) in enumerate(points):
        placed = rx.at(x, y)
        for j, lum in enumerate(luminaires):
            gains[i, j] = channel_gain(lum, placed)
    return gains


def superpose(
    waveforms: Sequence[tuple[Waveform, float]],
    noise_sigma: float,
    seed: int,
) -> Waveform:
    """
    Взвешенная сумма сигналов на общей оси времени плюс белый гауссов шум.

    Сигналы выравниваются по start_sample и дополняются нулями; шум добавляется
    один раз после суммирования.

    Raises:
        SampleRateMismatchError: частоты дискретизации различаются
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    if any(gain < 0 for _, gain in waveforms):
        raise ValueError("gains must be non-negative")
    if not waveforms:
        return Waveform(samples=np.zeros(0), sample_rate=1.0)
    rates = {w.sample_rate for w, _ in waveforms}
    if len(rates) != 1:
        raise SampleRateMismatchError(
            "all waveforms must share a sample rate",
            details={"sample_rates": sorted(rates)},
        )
    rate = rates.pop()
    origin = min(w.start_sample for w, _ in waveforms)
    end = max(w.end_sample for w, _ in waveforms)
    total = np.zeros(end - origin)
    for w, gain in waveforms:
        if gain == 0.0 or len(w) == 0:
            continue
        offset = w.start_sample - origin
        total[offset:offset + len(w)] += gain * w.samples
    if noise_sigma > 0:
        total += np.random.default_rng(seed).normal(0.0, noise_sigma, size=total.shape[0])
    return Waveform(samples=total, sample_rate=rate, coupling="unipolar", start_sample=origin)


__all__ = ["channel_gain", "gain_field", "normalized_tx_power", "rss_model", "superpose"]
