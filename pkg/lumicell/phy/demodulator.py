"""
Демодулятор кадров маяков.

Алгоритм:
1. Поиск кандидатов нормированной корреляцией с шаблоном преамбулы SFD+Sync
   (SFD как серия из 4 высоких уровней, за которой идёт чередование Sync).
2. Подстройка фазы символьного такта по Sync в пределах ±½ символа.
3. Оценка уровней high/low по преамбуле и нарезка 56 символов в центрах.
4. Проверка SFD, пар Manchester, контрольной суммы и EOF.
5. RSS = средний размах пар Data в физических единицах входа; clean по разбросу амплитуд.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import signal

from ..models import FRAME_SYMBOLS, PhyConfig
from .frame import (
    BeaconFrame,
    EOF_SYMBOLS,
    HIGH,
    PREAMBLE,
    SECTIONS,
    SFD_SYMBOLS,
    decode_bits,
)
from .waveform import Waveform, check_phy_config

logger = logging.getLogger(__name__)

# |u| ниже порога считается неразличимым уровнем (стирание).
ERASURE_THRESHOLD = 0.3
# Минимальное СКО окна (в нормированных единицах), чтобы корреляция имела смысл.
MIN_WINDOW_STD = 1e-3

_PREAMBLE_SIGNS = np.array([1.0 if level == HIGH else -1.0 for level in PREAMBLE])
_HIGH_IDX = np.flatnonzero(_PREAMBLE_SIGNS > 0)
_LOW_IDX = np.flatnonzero(_PREAMBLE_SIGNS < 0)
_SYNC_SLICE = SECTIONS["Sync"]
_DATA_SLICE = SECTIONS["Data"]
_EOF_SLICE = SECTIONS["EOF"]


@dataclass(frozen=True)
class DecodedFrame:
    """Принятый кадр: сообщение, RSS, отсчёт начала и флаг чистоты RSS."""

    frame: BeaconFrame
    rss: float
    start_sample: int
    clean: bool

    def as_tuple(self) -> tuple[BeaconFrame, float, int, bool]:
        return (self.frame, self.rss, self.start_sample, self.clean)


@dataclass
class DemodStats:
    """Счётчики кандидатов по причинам отбраковки."""

    candidates: int = 0
    decoded: int = 0
    dropped_levels: int = 0
    dropped_sfd: int = 0
    dropped_manchester: int = 0
    dropped_checksum: int = 0
    dropped_eof: int = 0
    truncated: int = 0

    @property
    def dropped(self) -> int:
        return (
            self.dropped_levels
            + self.dropped_sfd
            + self.dropped_manchester
            + self.dropped_checksum
            + self.dropped_eof
        )


def _preamble_template(samples_per_symbol: float) -> np.ndarray:
    length = int(round(len(PREAMBLE) * samples_per_symbol))
    symbol_of_sample = np.minimum(((np.arange(length) + 0.5) / samples_per_symbol).astype(int), len(PREAMBLE) - 1)
    return _PREAMBLE_SIGNS[symbol_of_sample]


def preamble_correlation(x: np.ndarray, samples_per_symbol: float) -> np.ndarray:
    """
    Нормированная взаимная корреляция сигнала с шаблоном преамбулы для каждого сдвига.

    Значение в [-1, 1]; окна с почти нулевой энергией получают 0.
    """
    template = _preamble_template(samples_per_symbol)
    m = template.shape[0]
    if x.shape[0] < m:
        return np.zeros(0)
    centered_template = template - template.mean()
    numerator = np.correlate(x, centered_template, mode="valid")
    csum = np.concatenate(([0.0], np.cumsum(x)))
    csum2 = np.concatenate(([0.0], np.cumsum(x * x)))
    window_sum = csum[m:] - csum[:-m]
    window_sq = csum2[m:] - csum2[:-m]
    energy = np.clip(window_sq - window_sum * window_sum / m, 0.0, None)
    denom = np.sqrt(energy) * np.linalg.norm(centered_template)
    ncc = np.zeros_like(numerator)
    valid = energy > m * MIN_WINDOW_STD**2
    ncc[valid] = numerator[valid] / denom[valid]
    return ncc


def _symbol_values(x: np.ndarray, start: float, samples_per_symbol: float) -> Optional[np.ndarray]:
    centers = start + (np.arange(FRAME_SYMBOLS) + 0.5) * samples_per_symbol - 0.5
    if centers[0] < 0 or centers[-1] > x.shape[0] - 1:
        return None
    return np.interp(centers, np.arange(x.shape[0]), x)


def _refine_phase(x: np.ndarray, start: int, samples_per_symbol: float) -> float:
    """Сдвиг в пределах ±½ символа, максимизирующий согласие с шаблоном Sync."""
    sync_idx = np.arange(_SYNC_SLICE.start, _SYNC_SLICE.stop)
    sync_signs = _PREAMBLE_SIGNS[sync_idx]
    offsets = np.linspace(-0.5, 0.5, 21) * samples_per_symbol
    grid = np.arange(x.shape[0])
    scores = np.full(offsets.shape[0], -np.inf)
    for i, offset in enumerate(offsets):
        centers = start + offset + (sync_idx + 0.5) * samples_per_symbol - 0.5
        if centers[0] < 0 or centers[-1] > x.shape[0] - 1:
            continue
        scores[i] = float(np.dot(sync_signs, np.interp(centers, grid, x)))
    best = float(scores.max())
    if not np.isfinite(best):
        return 0.0
    # Плоская вершина у прямоугольных символов: берём середину плато.
    plateau = offsets[scores >= best - 0.02 * abs(best)]
    return float(plateau.mean())


def _decode_candidate(
    x: np.ndarray,
    start: int,
    cfg: PhyConfig,
    samples_per_symbol: float,
    scale: float,
    stats: DemodStats,
) -> Optional[DecodedFrame]:
    offset = _refine_phase(x, start, samples_per_symbol)
    values = _symbol_values(x, start + offset, samples_per_symbol)
    if values is None:
        stats.truncated += 1
        return None

    high = float(values[_HIGH_IDX].mean())
    low = float(values[_LOW_IDX].mean())
    if not high > low:
        stats.dropped_levels += 1
        return None
    mid = 0.5 * (high + low)
    half = 0.5 * (high - low)
    u = (values - mid) / half

    if np.any(u[:SFD_SYMBOLS] <= ERASURE_THRESHOLD):
        stats.dropped_sfd += 1
        logger.debug("drop candidate at %d: SFD not high", start)
        return None

    data = u[_DATA_SLICE]
    first, second = data[0::2], data[1::2]
    if np.any(first * second >= 0) or np.any(np.abs(data) < ERASURE_THRESHOLD):
        stats.dropped_manchester += 1
        logger.debug("drop candidate at %d: invalid Manchester pair", start)
        return None

    bits = (first > second).astype(int).tolist()
    frame = decode_bits(bits)
    if frame is None:
        stats.dropped_checksum += 1
        logger.debug("drop candidate at %d: checksum mismatch", start)
        return None

    if np.any(u[_EOF_SLICE] >= -ERASURE_THRESHOLD):
        stats.dropped_eof += 1
        logger.debug("drop candidate at %d: EOF not low", start)
        return None

    raw = values[_DATA_SLICE]
    rss = float(np.mean(np.abs(raw[0::2] - raw[1::2]))) / scale
    amplitudes = np.abs(raw - mid)
    clean = bool(amplitudes.max() <= cfg.fluctuation_ratio * amplitudes.min())
    return DecodedFrame(frame=frame, rss=rss, start_sample=int(start), clean=clean)


def demodulate_with_stats(w: Waveform, cfg: PhyConfig) -> tuple[list[DecodedFrame], DemodStats]:
    """
    То же, что demodulate, плюс счётчики отбракованных кандидатов.
    """
    check_phy_config(cfg, sample_rate=w.sample_rate)
    stats = DemodStats()
    sps = w.sample_rate / cfg.f_mod
    x = w.samples
    if x.shape[0] < FRAME_SYMBOLS * sps:
        return [], stats

    ncc = preamble_correlation(x, sps)
    if ncc.size == 0:
        return [], stats
    peaks, _ = signal.find_peaks(ncc, height=cfg.detect_threshold, distance=max(1, int(SFD_SYMBOLS * 2 * sps)))

    decoded: list[DecodedFrame] = []
    busy_until = -1
    packet_samples = FRAME_SYMBOLS * sps
    for start in peaks:
        if start < busy_until:
            continue
        stats.candidates += 1
        result = _decode_candidate(x, int(start), cfg, sps, w.scale, stats)
        if result is None:
            continue
        stats.decoded += 1
        decoded.append(
            DecodedFrame(
                frame=result.frame,
                rss=result.rss,
                start_sample=w.start_sample + result.start_sample,
                clean=result.clean,
            )
        )
        busy_until = int(start + packet_samples - EOF_SYMBOLS * sps)
    return decoded, stats


def demodulate(w: Waveform, cfg: PhyConfig) -> list[DecodedFrame]:
    """
    Найти и декодировать все кадры в биполярном сигнале после receiver_chain.

    Кадры с нарушенной парой Manchester, контрольной суммой или разделителями
    отбрасываются; повторной передачи нет, маяк будет принят в следующих кадрах MAC.
    """
    decoded, _ = demodulate_with_stats(w, cfg)
    return decoded


__all__ = [
    "DecodedFrame",
    "DemodStats",
    "ERASURE_THRESHOLD",
    "demodulate",
    "demodulate_with_stats",
    "preamble_correlation",
]
