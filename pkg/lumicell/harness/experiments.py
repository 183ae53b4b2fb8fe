"""
Эксперименты локализации на стенде: статические точки, повторная оценка в одной точке,
траектория из двух замкнутых прямоугольников и работа с выключенным светильником.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..gpr.maps import IntensityMapSet, build_maps
from ..gpr.model import FingerprintSet, default_candidate_grid, select_hyperparams
from ..localization.bayes import BayesFilter
from ..localization.metrics import ErrorReport, error_metrics
from ..models import GPHyperparams, MotionParams
from .broadcast import observe_point
from .fingerprints import generate_fingerprints
from .scenarios import TESTBED_LIGHT_OFF_ID, Scenario

logger = logging.getLogger(__name__)

STATIC_SEED_OFFSET = 200_000
FIXED_SEED_OFFSET = 300_000
TRAJECTORY_SEED_OFFSET = 400_000
# Шагов на точку, отводимых под seed одного прогона статической точки.
_SEEDS_PER_POINT = 1_000

FIXED_POINT = (1.0, 1.0)
FIXED_SETTLE_CYCLES = 10
# Приёмник в опыте неподвижен: фильтр не размывает распределение между циклами.
STATIONARY_MOTION = MotionParams(sigma_move=0.0)
RECTANGLES = ((0.6, 0.6, 2.4, 2.4), (1.0, 1.0, 2.0, 2.0))
TRAJECTORY_STEP = 0.05
TRAJECTORY_WARMUP_CYCLES = 10


@dataclass(frozen=True)
class TrajectoryStep:
    step: int
    t: float
    truth: tuple[float, float]
    estimate: tuple[float, float]

    @property
    def error(self) -> float:
        return math.dist(self.truth, self.estimate)


@dataclass(frozen=True)
class LocalizationRun:
    """Последовательность оценок и метрики ошибок."""

    name: str
    steps: tuple[TrajectoryStep, ...]
    report: ErrorReport

    def rows(self) -> list[tuple[float, float, float, float, float, float]]:
        return [(s.t, s.estimate[0], s.estimate[1], s.truth[0], s.truth[1], s.error) for s in self.steps]


def _finish(name: str, steps: list[TrajectoryStep]) -> LocalizationRun:
    report = error_metrics([s.estimate for s in steps], [s.truth for s in steps])
    return LocalizationRun(name=name, steps=tuple(steps), report=report)


def _frame_duration(scenario: Scenario) -> float:
    return scenario.mac.n_slots * scenario.mac.slot_duration


def run_localization(
    scenario: Scenario,
    maps: IntensityMapSet,
    trajectory: Sequence[tuple[float, float]],
    *,
    motion: Optional[MotionParams] = None,
    seed: int,
    name: str = "trajectory",
    warmup: int = 0,
) -> LocalizationRun:
    """
    Пройти траекторию: в каждой истинной точке один цикл наблюдения, predict + update и MAP-оценка.

    Args:
        scenario: Сценарий (светильники, приёмник, MAC)
        maps: Карты интенсивности на решётке сценария
        trajectory: Истинные позиции по шагам; шаг длится один кадр MAC
        motion: Модель движения фильтра
        seed: Базовый seed; шаг k использует seed + k
        warmup: Циклов в первой точке до начала записи
    """
    if not trajectory:
        raise ValueError("trajectory must contain at least one position")
    bayes = BayesFilter(maps, motion)
    period = _frame_duration(scenario)
    start = trajectory[0]
    for k in range(warmup):
        trace = observe_point(scenario, start, frames=1, seed=seed + len(trajectory) + k)
        bayes.step(trace.observations()[0])

    steps: list[TrajectoryStep] = []
    for k, truth in enumerate(trajectory):
        trace = observe_point(scenario, truth, frames=1, seed=seed + k, index=k)
        estimate = bayes.step(trace.observations()[0])
        steps.append(
            TrajectoryStep(
                step=k,
                t=k * period,
                truth=(float(truth[0]), float(truth[1])),
                estimate=estimate.position,
            )
        )
    return _finish(name, steps)


# ---- Статические точки ----


def run_static(
    scenario: Scenario,
    maps: IntensityMapSet,
    *,
    cycles: int,
    motion: Optional[MotionParams] = None,
    threads: int = 1,
    name: str = "static",
) -> LocalizationRun:
    """
    Каждая точка оценки: отдельный прогон фильтра из равномерного априори на `cycles` циклов;
    оценивается итоговая MAP-оценка.
    """
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    period = _frame_duration(scenario)

    def work(index: int) -> TrajectoryStep:
        point = scenario.eval_points[index]
        seed = scenario.seed + STATIC_SEED_OFFSET + index * _SEEDS_PER_POINT
        run = run_localization(scenario, maps, [point] * cycles, motion=motion, seed=seed, name=name)
        final = run.steps[-1]
        return TrajectoryStep(step=index, t=(cycles - 1) * period, truth=final.truth, estimate=final.estimate)

    indices = range(len(scenario.eval_points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            steps = list(pool.map(work, indices))
    else:
        steps = [work(index) for index in indices]
    return _finish(name, steps)


# ---- Повторная оценка в одной точке ----


@dataclass(frozen=True)
class FixedPointResult:
    run: LocalizationRun
    settled_mean: float
    settled_std: float


def run_fixed_point(
    scenario: Scenario,
    maps: IntensityMapSet,
    *,
    cycles: int,
    point: tuple[float, float] = FIXED_POINT,
    motion: MotionParams = STATIONARY_MOTION,
) -> FixedPointResult:
    """
    Один прогон фильтра в неподвижной точке; статистика ошибки после первых 10 циклов.

    По умолчанию фильтр знает, что приёмник стоит: модель движения без диффузии,
    апостериорное распределение копит свидетельства всех циклов.
    """
    if cycles <= FIXED_SETTLE_CYCLES:
        raise ValueError(f"cycles must exceed {FIXED_SETTLE_CYCLES}")
    run = run_localization(
        scenario,
        maps,
        [point] * cycles,
        motion=motion,
        seed=scenario.seed + FIXED_SEED_OFFSET,
        name="fixed_point",
    )
    settled = run.report.errors[FIXED_SETTLE_CYCLES:]
    return FixedPointResult(run=run, settled_mean=float(settled.mean()), settled_std=float(settled.std()))


# ---- Траектория из прямоугольников ----


def _segment(a: tuple[float, float], b: tuple[float, float], step: float) -> list[tuple[float, float]]:
    """Точки от a к b с шагом не больше step; a не включается, b включается."""
    count = max(1, int(math.ceil(math.dist(a, b) / step - 1e-9)))
    return [
        (round(a[0] + (b[0] - a[0]) * k / count, 10), round(a[1] + (b[1] - a[1]) * k / count, 10))
        for k in range(1, count + 1)
    ]


def rectangle_loop(x0: float, y0: float, x1: float, y1: float, step: float) -> list[tuple[float, float]]:
    """Замкнутый обход прямоугольника против часовой стрелки от (x0, y0) обратно в (x0, y0)."""
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    path = [corners[0]]
    for a, b in zip(corners[:-1], corners[1:]):
        path.extend(_segment(a, b, step))
    return path


@dataclass(frozen=True)
class TrajectoryResult:
    run: LocalizationRun
    loops: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def loop_gaps(self) -> list[float]:
        """Расстояние между оценками в начале и в конце каждого замкнутого обхода."""
        steps = self.run.steps
        return [math.dist(steps[start].estimate, steps[end].estimate) for start, end in self.loops]


def rectangles_trajectory(step: float = TRAJECTORY_STEP) -> tuple[list[tuple[float, float]], list[tuple[int, int]]]:
    """Два прямоугольника, соединённые отрезком; возвращает путь и индексы начала/конца петель."""
    path: list[tuple[float, float]] = []
    loops: list[tuple[int, int]] = []
    for rect in RECTANGLES:
        loop = rectangle_loop(*rect, step)
        if path:
            path.extend(_segment(path[-1], loop[0], step)[:-1])
        start = len(path)
        path.extend(loop)
        loops.append((start, len(path) - 1))
    return path, loops


def run_rectangles(
    scenario: Scenario,
    maps: IntensityMapSet,
    *,
    motion: Optional[MotionParams] = None,
    step: float = TRAJECTORY_STEP,
) -> TrajectoryResult:
    path, loops = rectangles_trajectory(step)
    run = run_localization(
        scenario,
        maps,
        path,
        motion=motion,
        seed=scenario.seed + TRAJECTORY_SEED_OFFSET,
        name="rectangles",
        warmup=TRAJECTORY_WARMUP_CYCLES,
    )
    return TrajectoryResult(run=run, loops=tuple(loops))


# ---- Полный набор экспериментов ----


@dataclass(frozen=True)
class LocalizationResults:
    fingerprints: FingerprintSet
    hyperparams: GPHyperparams
    maps: IntensityMapSet
    static: LocalizationRun
    fixed_point: FixedPointResult
    rectangles: TrajectoryResult
    light_off: Optional[LocalizationRun] = None


def build_scenario_maps(scenario: Scenario, *, threads: int = 1) -> tuple[FingerprintSet, GPHyperparams, IntensityMapSet]:
    """Отпечатки, выбор гиперпараметров по правдоподобию и растеризация карт."""
    if scenario.map_grid is None:
        raise ValueError(f"scenario '{scenario.name}' has no map grid")
    fingerprints = generate_fingerprints(scenario, threads=threads)
    hp = select_hyperparams(fingerprints, default_candidate_grid(fingerprints))
    maps = build_maps(fingerprints, hp, scenario.map_grid)
    return fingerprints, hp, maps


def run_experiments(
    scenario: Scenario,
    *,
    static_cycles: int = 10,
    fixed_cycles: int = 100,
    motion: Optional[MotionParams] = None,
    light_off: bool = True,
    threads: int = 1,
) -> LocalizationResults:
    """
    Все эксперименты локализации над одним набором карт.

    Вариант с выключенным светильником #4 использует карты, построенные при всех включённых.
    `motion` задаёт модель движения статических точек и траектории; опыт с неподвижным
    приёмником всегда идёт со STATIONARY_MOTION.
    """
    fingerprints, hp, maps = build_scenario_maps(scenario, threads=threads)
    static = run_static(scenario, maps, cycles=static_cycles, motion=motion, threads=threads)
    logger.info("static: mean %.3f m, p90 %.3f m over %d point(s)", static.report.mean, static.report.p90, static.report.n_points)
    fixed = run_fixed_point(scenario, maps, cycles=fixed_cycles)
    logger.info("fixed point: settled mean %.3f m, std %.3f m", fixed.settled_mean, fixed.settled_std)
    rectangles = run_rectangles(scenario, maps, motion=motion)
    logger.info("rectangles: mean %.3f m, loop gaps %s", rectangles.run.report.mean, np.round(rectangles.loop_gaps, 3).tolist())

    off_run: Optional[LocalizationRun] = None
    if light_off and TESTBED_LIGHT_OFF_ID in scenario.luminaire_ids and len(scenario.luminaires) > 1:
        off_run = run_static(
            scenario.without_luminaire(TESTBED_LIGHT_OFF_ID),
            maps,
            cycles=static_cycles,
            motion=motion,
            threads=threads,
            name="light_off",
        )
        logger.info("light #%d off: mean %.3f m, p90 %.3f m", TESTBED_LIGHT_OFF_ID, off_run.report.mean, off_run.report.p90)
    return LocalizationResults(
        fingerprints=fingerprints,
        hyperparams=hp,
        maps=maps,
        static=static,
        fixed_point=fixed,
        rectangles=rectangles,
        light_off=off_run,
    )


__all__ = [
    "FIXED_POINT",
    "FixedPointResult",
    "LocalizationResults",
    "LocalizationRun",
    "RECTANGLES",
    "STATIONARY_MOTION",
    "TrajectoryResult",
    "TrajectoryStep",
    "build_scenario_maps",
    "rectangle_loop",
    "rectangles_trajectory",
    "run_experiments",
    "run_fixed_point",
    "run_localization",
    "run_rectangles",
    "run_static",
]
