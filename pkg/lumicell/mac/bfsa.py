"""
Базовый framed slotted ALOHA (BFSA): выбор слота, журнал передач, модели коллизий
(синхронная и асинхронная) и аналитика вероятности успеха.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Literal, Mapping, Optional

import numpy as np
from scipy.stats import norm

from ..exceptions import NoTransmissionsError

DEFAULT_SLOT_DURATION = 5.6e-3
# Относительный допуск при сравнении интервалов одинаковой длины.
_OVERLAP_RTOL = 1e-9

SimulationMode = Literal["theory", "sync", "async"]


def theoretical_success_rate(n_slots: int, n_tx: int) -> float:
    """
    Вероятность того, что все n передатчиков выберут разные слоты: N(N-1)...(N-n+1)/N^n.
    """
    if n_slots < 1:
        raise ValueError("n_slots must be >= 1")
    if n_tx < 0:
        raise ValueError("n_tx must be >= 0")
    if n_tx <= 1:
        return 1.0
    if n_tx > n_slots:
        return 0.0
    probability = 1.0
    for k in range(n_tx):
        probability *= (n_slots - k) / n_slots
    return probability


def frame_duration(n_slots: int, slot_duration: float = DEFAULT_SLOT_DURATION) -> float:
    """Длительность кадра MAC (латентность локализации): 20 x 5.6 мс = 112 мс."""
    return n_slots * slot_duration


def update_rate_hz(n_slots: int, slot_duration: float = DEFAULT_SLOT_DURATION) -> float:
    return 1.0 / frame_duration(n_slots, slot_duration)


@dataclass
class SlotSchedule:
    """
    Состояние BFSA одного светильника: N слотов, длительность слота, фаза и RNG.

    Каждый вызов draw_slot соответствует новому кадру MAC.
    """

    n_slots: int
    slot_duration: float = DEFAULT_SLOT_DURATION
    phase_offset: float = 0.0
    rng_seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValueError("n_slots must be >= 1")
        if not self.slot_duration > 0:
            raise ValueError("slot_duration must be positive")
        if not 0.0 <= self.phase_offset < self.frame_duration:
            raise ValueError("phase_offset must lie in [0, n_slots * slot_duration)")
        self.rng = np.random.default_rng(self.rng_seed)

    @property
    def frame_duration(self) -> float:
        return self.n_slots * self.slot_duration


def draw_slot(schedule: SlotSchedule) -> int:
    """Равномерный слот из {0..N-1}; последовательность воспроизводима по rng_seed."""
    return int(schedule.rng.integers(schedule.n_slots))


@dataclass(frozen=True)
class Transmission:
    """Одна передача маяка в журнале."""

    tx_id: int
    frame: int
    slot_index: int
    start: float
    end: float
    delivered: bool = False


@dataclass(frozen=True)
class TransmissionLog:
    """
    Журнал передач всех светильников; интервалы одного передатчика не пересекаются.
    """

    entries: tuple[Transmission, ...]
    slot_duration: float = DEFAULT_SLOT_DURATION

    def __post_init__(self) -> None:
        tol = _OVERLAP_RTOL * self.slot_duration
        last_end: dict[int, float] = {}
        for entry in sorted(self.entries, key=lambda e: (e.tx_id, e.start)):
            if abs((entry.end - entry.start) - self.slot_duration) > tol:
                raise ValueError(f"transmission of {entry.tx_id} does not last one slot")
            if entry.tx_id in last_end and entry.start < last_end[entry.tx_id] - tol:
                raise ValueError(f"transmissions of {entry.tx_id} overlap each other")
            last_end[entry.tx_id] = entry.end

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Transmission]:
        return iter(self.entries)

    @property
    def transmitters(self) -> list[int]:
        return sorted({entry.tx_id for entry in self.entries})

    def with_delivered(self, flags: Iterable[bool]) -> "TransmissionLog":
        entries = tuple(replace(entry, delivered=bool(flag)) for entry, flag in zip(self.entries, flags, strict=True))
        return TransmissionLog(entries=entries, slot_duration=self.slot_duration)


def build_transmission_log(schedules: Mapping[int, SlotSchedule], frames: int) -> TransmissionLog:
    """
    Разыграть `frames` кадров MAC: в каждом кадре каждый светильник выбирает новый слот.

    Начало передачи = phase_offset + frame * T + slot * slot_duration.
    """
    if frames < 0:
        raise ValueError("frames must be >= 0")
    if not schedules:
        return TransmissionLog(entries=())
    durations = {schedule.slot_duration for schedule in schedules.values()}
    if len(durations) != 1:
        raise ValueError("all schedules must share one slot duration")
    slot_duration = durations.pop()
    entries: list[Transmission] = []
    for frame in range(frames):
        for tx_id in sorted(schedules):
            schedule = schedules[tx_id]
            slot = draw_slot(schedule)
            start = schedule.phase_offset + frame * schedule.frame_duration + slot * slot_duration
            entries.append(
                Transmission(tx_id=tx_id, frame=frame, slot_index=slot, start=start, end=start + slot_duration)
            )
    return TransmissionLog(entries=tuple(entries), slot_duration=slot_duration)


def _collided(starts: np.ndarray, owners: np.ndarray, duration: float) -> np.ndarray:
    """
    Флаг коллизии для интервалов одинаковой длины: пересечение с чужим интервалом.

    Достаточно проверить соседей в порядке начала: свои интервалы не пересекаются.
    """
    count = starts.shape[0]
    if count == 0:
        return np.zeros(0, dtype=bool)
    order = np.argsort(starts, kind="stable")
    s = starts[order]
    o = owners[order]
    limit = duration * (1.0 - _OVERLAP_RTOL)
    gap = np.diff(s)
    clash = (gap < limit) & (o[1:] != o[:-1])
    hit = np.zeros(count, dtype=bool)
    hit[1:] |= clash
    hit[:-1] |= clash
    result = np.empty(count, dtype=bool)
    result[order] = hit
    return result


def mark_collisions(log: TransmissionLog) -> TransmissionLog:
    """Отметить доставку: передача доставлена, если не пересекается ни с одной чужой."""
    if not log.entries:
        return log
    starts = np.array([entry.start for entry in log.entries])
    owners = np.array([entry.tx_id for entry in log.entries])
    collided = _collided(starts, owners, log.slot_duration)
    return log.with_delivered(~collided)


def delivery_ratio(log: TransmissionLog, considered: Iterable[int]) -> float:
    """Доля доставленных сообщений рассматриваемых передатчиков по записанным флагам."""
    considered_ids = set(considered)
    if not considered_ids:
        raise ValueError("considered transmitter set must be non-empty")
    if not log.entries:
        raise NoTransmissionsError("no transmissions")
    relevant = [entry for entry in log.entries if entry.tx_id in considered_ids]
    if not relevant:
        raise NoTransmissionsError("no transmissions", details={"considered": sorted(considered_ids)})
    return sum(entry.delivered for entry in relevant) / len(relevant)


def per_message_success(log: TransmissionLog, considered: Iterable[int]) -> float:
    """
    Модифицированная вероятность успеха: доставленные / отправленные для considered.

    Коллизии считаются по пересечению со ВСЕМИ передатчиками журнала.
    """
    if not log.entries:
        raise NoTransmissionsError("no transmissions")
    return delivery_ratio(mark_collisions(log), considered)


# ---- Монте-Карло ----


def _check_simulation_args(n_slots: int, n_tx: int, frames: int) -> None:
    if n_slots < 1:
        raise ValueError("n_slots must be >= 1")
    if n_tx < 0:
        raise ValueError("n_tx must be >= 0")
    if frames < 1:
        raise ValueError("frames must be >= 1")


def sync_outcomes(n_slots: int, n_tx: int, frames: int, seed: int) -> np.ndarray:
    """Успех каждого кадра при выровненных слотах: все выбранные слоты различны."""
    _check_simulation_args(n_slots, n_tx, frames)
    rng = np.random.default_rng(seed)
    if n_tx <= 1:
        return np.ones(frames, dtype=bool)
    slots = np.sort(rng.integers(0, n_slots, size=(frames, n_tx)), axis=1)
    return np.all(np.diff(slots, axis=1) != 0, axis=1)


def async_outcomes(n_slots: int, n_tx: int, frames: int, seed: int) -> np.ndarray:
    """
    Успех каждого окна наблюдения при независимых фазах передатчиков.

    Единица времени = слот. Окна приёмника [kT, (k+1)T) выровнены с t = 0; окно успешно,
    если доставлены все сообщения, начавшиеся в нём. Кадры -1 и F разыгрываются,
    чтобы края окон видели соседей.
    """
    _check_simulation_args(n_slots, n_tx, frames)
    rng = np.random.default_rng(seed)
    if n_tx <= 1:
        return np.ones(frames, dtype=bool)
    period = float(n_slots)
    phases = rng.uniform(0.0, period, size=n_tx)
    frame_idx = np.arange(-1, frames + 1)
    slots = rng.integers(0, n_slots, size=(frame_idx.shape[0], n_tx))
    starts = (phases[None, :] + frame_idx[:, None] * period + slots).ravel()
    owners = np.tile(np.arange(n_tx), frame_idx.shape[0])
    collided = _collided(starts, owners, 1.0)

    window = np.floor(starts / period).astype(np.int64)
    inside = (window >= 0) & (window < frames)
    failed = np.zeros(frames, dtype=bool)
    failed[window[inside & collided]] = True
    return ~failed


def simulate_sync(n_slots: int, n_tx: int, frames: int, seed: int) -> float:
    """Эмпирическая вероятность успеха при идеально выровненных слотах."""
    return float(sync_outcomes(n_slots, n_tx, frames, seed).mean())


def simulate_async(n_slots: int, n_tx: int, frames: int, seed: int) -> float:
    """Эмпирическая вероятность успеха при случайных фазах кадров передатчиков."""
    return float(async_outcomes(n_slots, n_tx, frames, seed).mean())


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Доверительный интервал Уилсона для биномиальной доли."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    margin = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - margin), min(1.0, center + margin))


@dataclass(frozen=True)
class SuccessEstimate:
    """
    Точечная оценка вероятности успеха с интервалом Уилсона.

    Испытание = кадр (окно наблюдения); для теории successes не задаётся.
    """

    mode: SimulationMode
    n_slots: int
    n_tx: int
    frames: int
    rate: float
    ci_low: float
    ci_high: float
    successes: Optional[int] = None


def estimate_success(mode: SimulationMode, n_slots: int, n_tx: int, frames: int, seed: int) -> SuccessEstimate:
    """Оценка для одной точки кривой; для 'theory' интервал вырожден."""
    if mode == "theory":
        rate = theoretical_success_rate(n_slots, n_tx)
        return SuccessEstimate(mode, n_slots, n_tx, frames, rate, rate, rate)
    outcomes = sync_outcomes(n_slots, n_tx, frames, seed) if mode == "sync" else async_outcomes(n_slots, n_tx, frames, seed)
    successes = int(outcomes.sum())
    low, high = wilson_interval(successes, frames)
    return SuccessEstimate(mode, n_slots, n_tx, frames, successes / frames, low, high, successes)


__all__ = [
    "DEFAULT_SLOT_DURATION",
    "SlotSchedule",
    "SuccessEstimate",
    "Transmission",
    "TransmissionLog",
    "async_outcomes",
    "build_transmission_log",
    "delivery_ratio",
    "draw_slot",
    "estimate_success",
    "frame_duration",
    "mark_collisions",
    "per_message_success",
    "simulate_async",
    "simulate_sync",
    "sync_outcomes",
    "theoretical_success_rate",
    "update_rate_hz",
    "wilson_interval",
]
