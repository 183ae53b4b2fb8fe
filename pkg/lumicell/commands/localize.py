"""
Подкоманда localize: отпечатки, карты GPR и эксперименты байесовской локализации на стенде.
"""

from __future__ import annotations

import logging
from typing import Any

from ..artifacts import TRAJECTORY_COLUMNS, write_cdf, write_fingerprints, write_json, write_maps, write_rows
from ..exceptions import AcceptanceError
from ..harness.experiments import LocalizationResults, LocalizationRun, run_experiments
from ..mac.bfsa import update_rate_hz
from ..models import MotionParams, RunConfig
from .base import CommandContext, CommandReport, execute, resolve_scenario

logger = logging.getLogger(__name__)

COMMAND = "localize"
DEFAULT_SCENARIO = "testbed"
DEFAULT_STATIC_CYCLES = 10
DEFAULT_FIXED_CYCLES = 100

MAX_MEAN_ERROR = 0.20
MAX_P90_ERROR = 0.45
MAX_FIXED_STD = 0.05
MAX_LIGHT_OFF_RATIO = 2.0
MAX_LIGHT_OFF_MEAN = 0.45


def check_localization(results: LocalizationResults) -> list[str]:
    """Нарушения приёмочных свойств локализации (пустой список, если всё выполнено)."""
    problems: list[str] = []
    static = results.static.report
    if static.mean > MAX_MEAN_ERROR:
        problems.append(f"static mean error {static.mean:.3f} m > {MAX_MEAN_ERROR} m")
    if static.p90 > MAX_P90_ERROR:
        problems.append(f"static p90 error {static.p90:.3f} m > {MAX_P90_ERROR} m")
    if results.fixed_point.settled_std > MAX_FIXED_STD:
        problems.append(f"fixed-point std {results.fixed_point.settled_std:.3f} m > {MAX_FIXED_STD} m")
    if results.light_off is not None:
        off = results.light_off.report.mean
        if off < static.mean:
            problems.append(f"light-off mean {off:.3f} m is below the baseline {static.mean:.3f} m")
        if off > MAX_LIGHT_OFF_RATIO * static.mean:
            problems.append(f"light-off mean {off:.3f} m exceeds {MAX_LIGHT_OFF_RATIO}x the baseline")
        if off > MAX_LIGHT_OFF_MEAN:
            problems.append(f"light-off mean {off:.3f} m > {MAX_LIGHT_OFF_MEAN} m")
    return problems


def _write_run(ctx: CommandContext, run: LocalizationRun, stem: str, *, cdf: bool) -> None:
    ctx.record(write_rows(run.rows(), TRAJECTORY_COLUMNS, ctx.path(f"{stem}.csv")))
    if cdf:
        ctx.record(write_cdf(run.report.cdf, ctx.path(f"{stem.removesuffix('_trajectory')}_cdf.csv")))


def summarize(results: LocalizationResults, n_slots: int, slot_duration: float) -> dict[str, Any]:
    static = results.static.report
    off = results.light_off.report if results.light_off is not None else None
    return {
        "mean_m": static.mean,
        "p90_m": static.p90,
        "std_m": static.std,
        "n_points": static.n_points,
        "fixed_point_mean_m": results.fixed_point.settled_mean,
        "fixed_point_std_m": results.fixed_point.settled_std,
        "rectangles_mean_m": results.rectangles.run.report.mean,
        "loop_gaps_m": [float(gap) for gap in results.rectangles.loop_gaps],
        "light_off_mean_m": off.mean if off is not None else None,
        "light_off_p90_m": off.p90 if off is not None else None,
        "hyperparams": results.hyperparams.model_dump(),
        "update_rate_hz": update_rate_hz(n_slots, slot_duration),
    }


def _body(ctx: CommandContext) -> dict[str, Any]:
    config = ctx.config
    scenario = resolve_scenario(config, DEFAULT_SCENARIO)
    motion = MotionParams(sigma_move=config.sigma_move) if config.sigma_move is not None else MotionParams()
    light_off = config.light_off if config.light_off is not None else True
    ctx.span.set_attribute("scenario", scenario.name)
    ctx.span.set_attribute("points", len(scenario.eval_points))
    ctx.span.set_attribute("sigma_move", motion.sigma_move)

    results = run_experiments(
        scenario,
        static_cycles=config.static_cycles or DEFAULT_STATIC_CYCLES,
        fixed_cycles=config.fixed_cycles or DEFAULT_FIXED_CYCLES,
        motion=motion,
        light_off=light_off,
        threads=config.threads,
    )

    ctx.record(write_fingerprints(results.fingerprints, ctx.path("fingerprints.csv")))
    for path in write_maps(results.maps, ctx.path("maps")):
        ctx.record(path)
    _write_run(ctx, results.static, "static_trajectory", cdf=True)
    _write_run(ctx, results.fixed_point.run, "fixed_point", cdf=False)
    _write_run(ctx, results.rectangles.run, "rectangles", cdf=False)
    if results.light_off is not None:
        _write_run(ctx, results.light_off, "light_off_trajectory", cdf=True)
    else:
        logger.info("localize: light-off variant skipped")

    summary = summarize(results, scenario.mac.n_slots, scenario.mac.slot_duration)
    ctx.record(write_json(summary, ctx.path("summary.json")))
    logger.info("localize: mean %.3f m, p90 %.3f m", summary["mean_m"], summary["p90_m"])

    if config.check:
        problems = check_localization(results)
        if problems:
            raise AcceptanceError("; ".join(problems), details={"violations": problems})
    return summary


def run(config: RunConfig) -> CommandReport:
    return execute(COMMAND, config, _body)


__all__ = ["COMMAND", "check_localization", "run", "summarize"]
