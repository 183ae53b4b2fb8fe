"""
Подкоманды CLI. Каждая принимает RunConfig и возвращает CommandReport.
"""

from typing import Callable

from ..models import RunConfig
from . import floor_sim, localize, phy_roundtrip, success_rate
from .base import CommandReport, init_command_dependencies, resolve_scenario

COMMANDS: dict[str, Callable[[RunConfig], CommandReport]] = {
    phy_roundtrip.COMMAND: phy_roundtrip.run,
    success_rate.COMMAND: success_rate.run,
    floor_sim.COMMAND: floor_sim.run,
    localize.COMMAND: localize.run,
}

__all__ = ["COMMANDS", "CommandReport", "init_command_dependencies", "resolve_scenario"]
