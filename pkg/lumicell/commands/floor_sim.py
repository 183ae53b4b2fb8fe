"""
Подкоманда floor-sim: модифицированная вероятность успеха во всех точках этажа и её гистограмма.
"""

from __future__ import annotations

import logging
from typing import Any

from ..artifacts import TRACE_COLUMNS, write_json, write_rows
from ..exceptions import AcceptanceError
from ..harness.broadcast import ObservationTrace, gain_rows, run_broadcast, success_histogram
from ..models import RunConfig
from .base import CommandContext, CommandReport, execute, resolve_scenario

logger = logging.getLogger(__name__)

COMMAND = "floor-sim"
DEFAULT_SCENARIO = "floor"

# Диапазоны медианы для полного синтеза сигналов, по числу слотов.
MEDIAN_BOUNDS = {20: (0.80, 0.90), 50: (0.89, 0.97)}


def check_floor(trace: ObservationTrace) -> list[str]:
    """Нарушения приёмочных свойств прогона этажа."""
    problems: list[str] = []
    summary = trace.summary()
    bounds = MEDIAN_BOUNDS.get(trace.n_slots)
    if trace.mode == "waveform" and bounds is not None:
        low, high = bounds
        if not low <= summary["median"] <= high:
            problems.append(f"N={trace.n_slots}: median {summary['median']:.3f} outside [{low}, {high}]")
    elif bounds is None:
        logger.info("no median bounds for N=%d, only phantom decodes are checked", trace.n_slots)
    if trace.phantom_decodes:
        problems.append(f"{trace.phantom_decodes} phantom decode(s)")
    return problems


def _body(ctx: CommandContext) -> dict[str, Any]:
    config = ctx.config
    scenario = resolve_scenario(config, DEFAULT_SCENARIO, repetitions=config.floor_repetitions)
    ctx.span.set_attribute("scenario", scenario.name)
    ctx.span.set_attribute("mode", scenario.mac.mode)
    ctx.span.set_attribute("n_slots", scenario.mac.n_slots)
    ctx.span.set_attribute("points", len(scenario.eval_points))

    trace = run_broadcast(scenario, frames=config.frames, threads=config.threads)
    ctx.frames("decoded", trace.decoded_frames)
    ctx.frames("dropped", trace.dropped_frames)

    point_rows = [(p.point[0], p.point[1], p.success_rate) for p in trace.points]
    ctx.record(write_rows(point_rows, ["point_x", "point_y", "success_rate"], ctx.path("points.csv")))
    histogram = success_histogram(trace.success_rates)
    ctx.record(write_rows(histogram, ["bin_low", "bin_high", "count"], ctx.path("histogram.csv")))
    gains = gain_rows(scenario, scenario.eval_points[0])
    ctx.record(write_rows(gains, ["x", "y", "beacon_id", "gain"], ctx.path("gains.csv")))
    if config.trace:
        ctx.record(write_rows(trace.rows(), TRACE_COLUMNS, ctx.path("trace.csv")))

    summary = trace.summary()
    ctx.record(write_json(summary, ctx.path("summary.json")))
    logger.info(
        "floor-sim: median %.3f, IQR %.3f over %d point(s)",
        summary["median"],
        summary["iqr"],
        summary["n_points"],
    )

    if config.check:
        problems = check_floor(trace)
        if problems:
            raise AcceptanceError("; ".join(problems), details={"violations": problems})
    return summary


def run(config: RunConfig) -> CommandReport:
    """
    Выполнить floor-sim.

    По умолчанию полный синтез сигналов; `mac.mode=synchronized` даёт быстрый интервальный прогон.
    """
    return execute(COMMAND, config, _body)


__all__ = ["COMMAND", "MEDIAN_BOUNDS", "check_floor", "run"]
