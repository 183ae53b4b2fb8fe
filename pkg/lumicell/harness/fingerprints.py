"""
Синтетический сбор отпечатков RSS на сетке сценария.
"""

from __future__ import annotations

import logging

import numpy as np

from ..gpr.model import FingerprintSet
from .broadcast import run_broadcast
from .scenarios import Scenario

logger = logging.getLogger(__name__)

# Отпечатки разыгрываются с отдельными seed, чтобы не совпадать с точками оценки.
FINGERPRINT_SEED_OFFSET = 100_000


def generate_fingerprints(scenario: Scenario, *, threads: int = 1) -> FingerprintSet:
    """
    В каждой точке сетки отпечатков: fingerprint_repetitions кадров MAC.

    RSS маяка: среднее чистых принятых значений; маяк, ни разу не принятый в точке, получает 0.
    """
    if scenario.fingerprint_grid is None:
        raise ValueError(f"scenario '{scenario.name}' has no fingerprint grid")
    positions = scenario.fingerprint_grid.nodes()
    trace = run_broadcast(
        scenario,
        points=positions,
        frames=scenario.fingerprint_repetitions,
        threads=threads,
        seed_offset=FINGERPRINT_SEED_OFFSET,
    )
    beacon_ids = scenario.luminaire_ids
    observations = {beacon_id: np.zeros(positions.shape[0]) for beacon_id in beacon_ids}
    missing = 0
    for i, point_trace in enumerate(trace.points):
        for beacon_id in beacon_ids:
            values = [
                readings[beacon_id].rss
                for readings in point_trace.frames
                if beacon_id in readings and readings[beacon_id].clean
            ]
            if values:
                observations[beacon_id][i] = float(np.mean(values))
            else:
                missing += 1
    if missing:
        logger.info("fingerprints: %d (point, beacon) pair(s) never decoded, stored as 0", missing)
    return FingerprintSet(positions=positions, observations=observations)


__all__ = ["FINGERPRINT_SEED_OFFSET", "generate_fingerprints"]
