"""
Трансляция маяков в точках оценки: интервальная модель коллизий или полный синтез сигналов.

Каждая точка: независимая единица работы с собственным seed = scenario.seed + индекс,
поэтому результат не зависит от числа потоков.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from ..channel.optical import gain_field, superpose
from ..exceptions import LumicellError, ScenarioError
from ..localization.bayes import Observation, Reading
from ..mac.bfsa import SlotSchedule, TransmissionLog, build_transmission_log, delivery_ratio, mark_collisions
from ..models import Luminaire
from ..phy.demodulator import demodulate_with_stats
from ..phy.frame import BeaconFrame, encode_frame
from ..phy.receiver import receiver_chain
from ..phy.waveform import Waveform, dummy_carrier, modulate
from .scenarios import Scenario, top_k_beacons, visible_luminaires

logger = logging.getLogger(__name__)

# Допуск сопоставления принятого кадра с журналом, в символах.
MATCH_TOLERANCE_SYMBOLS = 2.0
HISTOGRAM_BINS = 20


@dataclass(frozen=True)
class PointTrace:
    """Наблюдения одной точки: чтения по кадрам MAC и модифицированная вероятность успеха."""

    index: int
    point: tuple[float, float]
    frames: tuple[Mapping[int, Reading], ...]
    top_k: tuple[int, ...]
    success_rate: float
    sent: int
    delivered: int
    frame_duration: float
    phantom_decodes: int = 0
    captured_decodes: int = 0
    decoded_frames: int = 0
    dropped_frames: int = 0

    def observations(self) -> list[Observation]:
        return [
            Observation(t=frame * self.frame_duration, readings=dict(readings))
            for frame, readings in enumerate(self.frames)
        ]

    def rows(self) -> list[tuple[float, float, int, int, float, bool]]:
        x, y = self.point
        return [
            (x, y, frame, beacon_id, reading.rss, reading.clean)
            for frame, readings in enumerate(self.frames)
            for beacon_id, reading in sorted(readings.items())
        ]


@dataclass(frozen=True)
class ObservationTrace:
    scenario: str
    mode: str
    n_slots: int
    points: tuple[PointTrace, ...] = field(default_factory=tuple)

    @property
    def success_rates(self) -> np.ndarray:
        return np.array([trace.success_rate for trace in self.points], dtype=float)

    @property
    def phantom_decodes(self) -> int:
        return sum(trace.phantom_decodes for trace in self.points)

    @property
    def captured_decodes(self) -> int:
        return sum(trace.captured_decodes for trace in self.points)

    @property
    def decoded_frames(self) -> int:
        return sum(trace.decoded_frames for trace in self.points)

    @property
    def dropped_frames(self) -> int:
        return sum(trace.dropped_frames for trace in self.points)

    def rows(self) -> list[tuple[float, float, int, int, float, bool]]:
        return [row for trace in self.points for row in trace.rows()]

    def summary(self) -> dict[str, float | int | str]:
        rates = self.success_rates
        q25, q50, q75 = np.percentile(rates, [25, 50, 75])
        return {
            "median": float(q50),
            "mean": float(rates.mean()),
            "iqr": float(q75 - q25),
            "n_points": int(rates.shape[0]),
            "n_slots": self.n_slots,
            "mode": self.mode,
            "phantom_decodes": self.phantom_decodes,
            "captured_decodes": self.captured_decodes,
        }


def success_histogram(rates: Sequence[float], bins: int = HISTOGRAM_BINS) -> list[tuple[float, float, int]]:
    """Гистограмма вероятностей успеха: равные корзины на [0, 1]."""
    counts, edges = np.histogram(np.asarray(rates, dtype=float), bins=bins, range=(0.0, 1.0))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


def gain_rows(scenario: Scenario, point: Sequence[float]) -> list[tuple[float, float, int, float]]:
    """Усиления канала от светильников в поле зрения: строки x, y, beacon_id, gain."""
    visible = [lum for lum, _ in visible_luminaires(scenario, point)]
    gains = gain_field(visible, scenario.receiver, np.array([point], dtype=float))[0]
    return [(float(point[0]), float(point[1]), lum.id, float(gain)) for lum, gain in zip(visible, gains)]


# ---- Разыгрывание одной точки ----


def _schedules(
    scenario: Scenario,
    luminaires: Sequence[Luminaire],
    seed_seq: np.random.SeedSequence,
) -> dict[int, SlotSchedule]:
    mac = scenario.mac
    frame_duration = mac.n_slots * mac.slot_duration
    phase_seq, *lum_seqs = seed_seq.spawn(len(luminaires) + 1)
    phase_rng = np.random.default_rng(phase_seq)
    rate = scenario.phy.analog_rate
    schedules: dict[int, SlotSchedule] = {}
    for lum, child in zip(luminaires, lum_seqs):
        phase = 0.0
        if mac.phases_random:
            # Фаза квантуется до отсчёта аналоговой частоты, чтобы синтез был целочисленным.
            phase = min(math.floor(phase_rng.uniform(0.0, frame_duration) * rate) / rate, frame_duration * (1 - 1e-12))
        schedules[lum.id] = SlotSchedule(
            n_slots=mac.n_slots,
            slot_duration=mac.slot_duration,
            phase_offset=phase,
            rng_seed=int(child.generate_state(1)[0]),
        )
    return schedules


def _interval_readings(
    log: TransmissionLog,
    expected: Mapping[int, float],
    noise_sigma: float,
    rng: np.random.Generator,
    frames: int,
) -> tuple[TransmissionLog, list[dict[int, Reading]]]:
    marked = mark_collisions(log)
    readings: list[dict[int, Reading]] = [{} for _ in range(frames)]
    for entry in marked:
        if not entry.delivered:
            continue
        rss = expected[entry.tx_id]
        if noise_sigma > 0:
            rss += float(rng.normal(0.0, noise_sigma))
        readings[entry.frame][entry.tx_id] = Reading(rss=max(rss, 0.0), clean=True)
    return marked, readings


@dataclass
class _WaveformOutcome:
    log: TransmissionLog
    readings: list[dict[int, Reading]]
    phantoms: int
    captured: int
    decoded: int
    dropped: int


def _waveform_readings(
    scenario: Scenario,
    log: TransmissionLog,
    expected: Mapping[int, float],
    noise_seed: int,
    frames: int,
) -> _WaveformOutcome:
    """
    Синтез суммарной интенсивности на аналоговой частоте, цепочка приёмника и демодуляция.

    Светильник в простое излучает несущую-заглушку; на время пакета несущая заменяется пакетом.

    Кадр, принятый поверх чужой передачи в том же интервале (захват сильным сигналом),
    не считается доставленным, а его RSS помечается нечистым: в нём смешана энергия
    двух пакетов. Так доставка совпадает с бинарной моделью коллизий при нулевом шуме.
    """
    cfg = scenario.phy
    rate = cfg.analog_rate
    lead = scenario.mac.slot_duration
    horizon = lead + max((entry.end for entry in log), default=0.0) + 2 * scenario.mac.slot_duration
    n_samples = int(math.ceil(horizon * rate))

    total_power = float(sum(expected.values()))
    parts: list[tuple[Waveform, float]] = [(dummy_carrier(n_samples, cfg, total_power, sample_rate=rate), 1.0)]
    packets = {
        tx_id: modulate(encode_frame(BeaconFrame.for_payload(tx_id)), cfg, 1.0, sample_rate=rate) for tx_id in expected
    }
    for entry in log:
        start = int(round((lead + entry.start) * rate))
        packet = packets[entry.tx_id]
        carrier = dummy_carrier(len(packet), cfg, 1.0, sample_rate=rate, start_sample=start)
        delta = Waveform(samples=packet.samples - carrier.samples, sample_rate=rate, start_sample=start)
        parts.append((delta, expected[entry.tx_id]))

    received = superpose(parts, noise_sigma=scenario.receiver.noise_sigma, seed=noise_seed)
    adc = receiver_chain(received, cfg)
    decoded, stats = demodulate_with_stats(adc, cfg)

    tolerance = MATCH_TOLERANCE_SYMBOLS / cfg.f_mod
    pending: dict[int, list[int]] = {}
    for idx, entry in enumerate(log.entries):
        pending.setdefault(entry.tx_id, []).append(idx)
    overlapped = [not entry.delivered for entry in mark_collisions(log)]
    flags = [False] * len(log)
    readings: list[dict[int, Reading]] = [{} for _ in range(frames)]
    phantoms = captured = 0
    for item in decoded:
        t = item.start_sample / adc.sample_rate - lead
        candidates = pending.get(item.frame.payload, [])
        match = next((idx for idx in candidates if abs(log.entries[idx].start - t) <= tolerance), None)
        if match is None:
            phantoms += 1
            continue
        candidates.remove(match)
        frame = log.entries[match].frame
        if overlapped[match]:
            captured += 1
            readings[frame][item.frame.payload] = Reading(rss=item.rss, clean=False)
            continue
        flags[match] = True
        readings[frame][item.frame.payload] = Reading(rss=item.rss, clean=item.clean)
    return _WaveformOutcome(
        log=log.with_delivered(flags),
        readings=readings,
        phantoms=phantoms,
        captured=captured,
        decoded=stats.decoded,
        dropped=stats.dropped,
    )


def observe_point(
    scenario: Scenario,
    point: Sequence[float],
    *,
    frames: int,
    seed: int,
    index: int = 0,
) -> PointTrace:
    """
    Разыграть `frames` кадров MAC в точке и собрать наблюдения.

    Raises:
        ScenarioError: ошибка модуля с контекстом точки
    """
    x, y = float(point[0]), float(point[1])
    try:
        visible = visible_luminaires(scenario, (x, y))
        expected = {lum.id: rss for lum, rss in visible}
        considered = top_k_beacons(scenario, (x, y), scenario.top_k)
        seed_seq = np.random.SeedSequence(seed)
        schedule_seq, noise_seq = seed_seq.spawn(2)
        schedules = _schedules(scenario, [lum for lum, _ in visible], schedule_seq)
        log = build_transmission_log(schedules, frames)

        phantoms = captured = decoded = dropped = 0
        if scenario.mac.mode == "waveform":
            outcome = _waveform_readings(scenario, log, expected, int(noise_seq.generate_state(1)[0]), frames)
            marked, readings = outcome.log, outcome.readings
            phantoms, captured = outcome.phantoms, outcome.captured
            decoded, dropped = outcome.decoded, outcome.dropped
        else:
            noise_rng = np.random.default_rng(noise_seq)
            marked, readings = _interval_readings(log, expected, scenario.receiver.noise_sigma, noise_rng, frames)
            decoded = sum(entry.delivered for entry in marked)
            dropped = len(marked) - decoded

        rate = delivery_ratio(marked, considered)
        relevant = [entry for entry in marked if entry.tx_id in set(considered)]
    except (LumicellError, ValueError) as exc:
        raise ScenarioError(
            f"broadcast failed at point {index} ({x:.3f}, {y:.3f}): {exc}",
            cause=exc,
            details={"point_index": index, "x": x, "y": y, "reason": str(exc)},
        ) from exc

    if phantoms:
        logger.warning("point %d (%.3f, %.3f): %d phantom decode(s)", index, x, y, phantoms)
    return PointTrace(
        index=index,
        point=(x, y),
        frames=tuple(readings),
        top_k=tuple(considered),
        success_rate=rate,
        sent=len(relevant),
        delivered=sum(entry.delivered for entry in relevant),
        frame_duration=scenario.mac.n_slots * scenario.mac.slot_duration,
        phantom_decodes=phantoms,
        captured_decodes=captured,
        decoded_frames=decoded,
        dropped_frames=dropped,
    )


def run_broadcast(
    scenario: Scenario,
    *,
    points: Optional[Sequence[Sequence[float]]] = None,
    frames: Optional[int] = None,
    threads: int = 1,
    seed_offset: int = 0,
) -> ObservationTrace:
    """
    Трансляция во всех точках оценки (или в заданных точках).

    Args:
        scenario: Сценарий
        points: Точки вместо scenario.eval_points
        frames: Кадров MAC на точку; по умолчанию scenario.repetitions
        threads: Число потоков; результат от него не зависит
        seed_offset: Сдвиг seed для независимых этапов (отпечатки, эксперименты)
    """
    targets = [tuple(p) for p in (points if points is not None else scenario.eval_points)]
    n_frames = frames or scenario.repetitions
    if threads < 1:
        raise ValueError("threads must be >= 1")

    def work(index: int) -> PointTrace:
        seed = scenario.seed + seed_offset + index
        return observe_point(scenario, targets[index], frames=n_frames, seed=seed, index=index)

    logger.info(
        "broadcast %s: %d point(s), %d frame(s), mode=%s, N=%d, threads=%d",
        scenario.name,
        len(targets),
        n_frames,
        scenario.mac.mode,
        scenario.mac.n_slots,
        threads,
    )
    if threads == 1:
        traces = [work(index) for index in range(len(targets))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(work, range(len(targets))))
    return ObservationTrace(
        scenario=scenario.name,
        mode=scenario.mac.mode,
        n_slots=scenario.mac.n_slots,
        points=tuple(traces),
    )


__all__ = [
    "HISTOGRAM_BINS",
    "MATCH_TOLERANCE_SYMBOLS",
    "ObservationTrace",
    "PointTrace",
    "gain_rows",
    "observe_point",
    "run_broadcast",
    "success_histogram",
]
