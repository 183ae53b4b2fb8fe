"""
Подкоманда success-rate: кривая вероятности успеха BFSA от числа слотов в кадре.
"""

from __future__ import annotations

import logging
from typing import Any

from ..artifacts import SUCCESS_RATE_COLUMNS, write_json, write_rows
from ..exceptions import AcceptanceError
from ..mac.bfsa import (
    DEFAULT_SLOT_DURATION,
    SimulationMode,
    SuccessEstimate,
    estimate_success,
    frame_duration,
    update_rate_hz,
)
from ..models import RunConfig
from .base import CommandContext, CommandReport, execute

logger = logging.getLogger(__name__)

COMMAND = "success-rate"
DEFAULT_SLOT_LIST = (5, 10, 15, 20, 25, 30)
DEFAULT_TRANSMITTERS = 4
DEFAULT_FRAMES = 100_000
MODES: tuple[SimulationMode, ...] = ("theory", "sync", "async")

THEORY_TOLERANCE = 0.01
THEORY_CHECK_SLOTS = (10, 20, 50)
ASYNC_MARGIN = 0.02
ASYNC_CHECK_SLOTS = (10, 20)


def sweep(slot_list: list[int], n_tx: int, frames: int, seed: int) -> list[SuccessEstimate]:
    """Оценки для всех N и режимов; точка N использует seed + N."""
    estimates = []
    for n_slots in sorted(set(slot_list)):
        for mode in MODES:
            estimates.append(estimate_success(mode, n_slots, n_tx, frames, seed + n_slots))
    return estimates


def check_curve(estimates: list[SuccessEstimate]) -> list[str]:
    """
    Нарушения приёмочных свойств кривой (пустой список, если всё выполнено).

    Проверяются только те N, что есть в прогоне.
    """
    by_key = {(e.mode, e.n_slots): e.rate for e in estimates}
    slots = sorted({e.n_slots for e in estimates})
    problems: list[str] = []
    for n_slots in THEORY_CHECK_SLOTS:
        if ("sync", n_slots) in by_key:
            gap = abs(by_key[("sync", n_slots)] - by_key[("theory", n_slots)])
            if gap > THEORY_TOLERANCE:
                problems.append(f"N={n_slots}: sync deviates from theory by {gap:.4f}")
    for n_slots in ASYNC_CHECK_SLOTS:
        if ("async", n_slots) in by_key and not by_key[("async", n_slots)] < by_key[("sync", n_slots)] - ASYNC_MARGIN:
            problems.append(f"N={n_slots}: async is not below sync by {ASYNC_MARGIN}")
    for mode in MODES:
        rates = [by_key[(mode, n)] for n in slots]
        if any(b < a for a, b in zip(rates, rates[1:])):
            problems.append(f"{mode} curve is not monotone in N")
    return problems


def _body(ctx: CommandContext) -> dict[str, Any]:
    config = ctx.config
    slot_list = list(config.slot_list or DEFAULT_SLOT_LIST)
    n_tx = config.transmitters if config.transmitters is not None else DEFAULT_TRANSMITTERS
    frames = config.frames or DEFAULT_FRAMES
    ctx.span.set_attribute("transmitters", n_tx)
    ctx.span.set_attribute("frames", frames)

    estimates = sweep(slot_list, n_tx, frames, config.seed)
    rows = [(e.n_slots, e.n_tx, e.mode, e.frames, e.rate, e.ci_low, e.ci_high) for e in estimates]
    ctx.record(write_rows(rows, SUCCESS_RATE_COLUMNS, ctx.path("success_rate.csv")))

    slots = sorted(set(slot_list))
    summary = {
        "transmitters": n_tx,
        "frames": frames,
        "slot_duration_s": DEFAULT_SLOT_DURATION,
        "frame_duration_s": {str(n): frame_duration(n) for n in slots},
        "update_rate_hz": {str(n): update_rate_hz(n) for n in slots},
    }
    ctx.record(write_json(summary, ctx.path("summary.json")))
    for e in estimates:
        logger.debug("N=%d %s: %.4f [%.4f, %.4f]", e.n_slots, e.mode, e.rate, e.ci_low, e.ci_high)

    if config.check:
        problems = check_curve(estimates)
        if problems:
            raise AcceptanceError("; ".join(problems), details={"violations": problems})
        logger.info("success-rate: acceptance checks passed")
    return summary


def run(config: RunConfig) -> CommandReport:
    return execute(COMMAND, config, _body)


__all__ = ["COMMAND", "DEFAULT_SLOT_LIST", "check_curve", "run", "sweep"]
