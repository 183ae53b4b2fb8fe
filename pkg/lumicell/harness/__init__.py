"""
Оркестрация сценариев: трансляция маяков, отпечатки и эксперименты локализации.
"""

from .broadcast import ObservationTrace, PointTrace, gain_rows, observe_point, run_broadcast, success_histogram
from .experiments import (
    FixedPointResult,
    LocalizationResults,
    LocalizationRun,
    TrajectoryResult,
    build_scenario_maps,
    run_experiments,
    run_fixed_point,
    run_localization,
    run_rectangles,
    run_static,
)
from .fingerprints import generate_fingerprints
from .scenarios import (
    BUILTIN_SCENARIOS,
    MacSettings,
    Scenario,
    builtin_scenario,
    canonical_floor,
    canonical_testbed,
    customize,
    top_k_beacons,
    visible_luminaires,
)

__all__ = [
    "BUILTIN_SCENARIOS",
    "FixedPointResult",
    "LocalizationResults",
    "LocalizationRun",
    "MacSettings",
    "ObservationTrace",
    "PointTrace",
    "Scenario",
    "TrajectoryResult",
    "build_scenario_maps",
    "builtin_scenario",
    "canonical_floor",
    "canonical_testbed",
    "customize",
    "gain_rows",
    "generate_fingerprints",
    "observe_point",
    "run_broadcast",
    "run_experiments",
    "run_fixed_point",
    "run_localization",
    "run_rectangles",
    "run_static",
    "success_histogram",
    "top_k_beacons",
    "visible_luminaires",
]
