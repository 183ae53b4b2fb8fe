"""
MAC-уровень: базовый framed slotted ALOHA и аналитика успеха передач.
"""

from .bfsa import (
    DEFAULT_SLOT_DURATION,
    SlotSchedule,
    SuccessEstimate,
    Transmission,
    TransmissionLog,
    build_transmission_log,
    delivery_ratio,
    draw_slot,
    estimate_success,
    frame_duration,
    mark_collisions,
    per_message_success,
    simulate_async,
    simulate_sync,
    theoretical_success_rate,
    update_rate_hz,
    wilson_interval,
)

__all__ = [
    "DEFAULT_SLOT_DURATION",
    "SlotSchedule",
    "SuccessEstimate",
    "Transmission",
    "TransmissionLog",
    "build_transmission_log",
    "delivery_ratio",
    "draw_slot",
    "estimate_success",
    "frame_duration",
    "mark_collisions",
    "per_message_success",
    "simulate_async",
    "simulate_sync",
    "theoretical_success_rate",
    "update_rate_hz",
    "wilson_interval",
]
