import math

import pytest

from lumicell.exceptions import NoTransmissionsError
from lumicell.mac.bfsa import (
    DEFAULT_SLOT_DURATION,
    SlotSchedule,
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

SLOT = DEFAULT_SLOT_DURATION


def _tx(tx_id: int, start_slots: float, frame: int = 0) -> Transmission:
    start = start_slots * SLOT
    return Transmission(tx_id=tx_id, frame=frame, slot_index=0, start=start, end=start + SLOT)


def test_theoretical_success_rate_values():
    assert theoretical_success_rate(20, 4) == pytest.approx(20 * 19 * 18 * 17 / 20**4)
    assert theoretical_success_rate(20, 4) == pytest.approx(0.7268, abs=1e-4)
    assert theoretical_success_rate(5, 6) == 0.0
    assert theoretical_success_rate(7, 1) == 1.0
    assert theoretical_success_rate(7, 0) == 1.0
    with pytest.raises(ValueError):
        theoretical_success_rate(0, 2)


@pytest.mark.parametrize("n_slots", [10, 20, 50])
def test_sync_simulation_matches_closed_form(n_slots):
    rate = simulate_sync(n_slots, 4, 100_000, seed=n_slots)
    assert abs(rate - theoretical_success_rate(n_slots, 4)) <= 0.01


@pytest.mark.parametrize("n_slots", [10, 20])
def test_asynchrony_penalty(n_slots):
    sync = simulate_sync(n_slots, 4, 100_000, seed=1)
    async_rate = simulate_async(n_slots, 4, 100_000, seed=1)
    assert async_rate < sync - 0.02


def test_async_curve_is_monotone():
    rates = [simulate_async(n, 4, 100_000, seed=n) for n in (5, 10, 15, 20, 25, 30)]
    assert rates == sorted(rates)


def test_single_transmitter_always_succeeds():
    assert simulate_sync(5, 1, 1000, seed=0) == 1.0
    assert simulate_async(5, 1, 1000, seed=0) == 1.0


def test_simulation_is_reproducible_and_validates_frames():
    assert simulate_async(10, 4, 5000, seed=9) == simulate_async(10, 4, 5000, seed=9)
    with pytest.raises(ValueError):
        simulate_sync(10, 4, 0, seed=0)


def test_slot_schedule_draws_are_reproducible():
    a = SlotSchedule(n_slots=20, rng_seed=3)
    b = SlotSchedule(n_slots=20, rng_seed=3)
    draws_a = [draw_slot(a) for _ in range(50)]
    assert draws_a == [draw_slot(b) for _ in range(50)]
    assert all(0 <= slot < 20 for slot in draws_a)


def test_slot_schedule_rejects_phase_outside_frame():
    with pytest.raises(ValueError):
        SlotSchedule(n_slots=4, phase_offset=4 * SLOT)
    with pytest.raises(ValueError):
        SlotSchedule(n_slots=0)


def test_build_transmission_log_places_slots_in_frames():
    schedules = {
        1: SlotSchedule(n_slots=5, rng_seed=1),
        2: SlotSchedule(n_slots=5, phase_offset=0.5 * SLOT, rng_seed=2),
    }
    log = build_transmission_log(schedules, frames=3)
    assert len(log) == 6
    assert log.transmitters == [1, 2]
    period = 5 * SLOT
    for entry in log:
        phase = schedules[entry.tx_id].phase_offset
        assert entry.start == pytest.approx(phase + entry.frame * period + entry.slot_index * SLOT)
        assert entry.end - entry.start == pytest.approx(SLOT)


def test_mark_collisions_uses_interval_overlap():
    log = TransmissionLog(entries=(_tx(1, 0.0), _tx(2, 0.5), _tx(3, 3.0), _tx(1, 1.0, frame=1)))
    marked = mark_collisions(log)
    assert [entry.delivered for entry in marked] == [False, False, True, False]
    assert delivery_ratio(marked, [3]) == 1.0
    assert delivery_ratio(marked, [1, 3]) == pytest.approx(1 / 3)


def test_back_to_back_slots_do_not_collide():
    marked = mark_collisions(TransmissionLog(entries=(_tx(1, 0.0), _tx(2, 1.0))))
    assert all(entry.delivered for entry in marked)


def test_per_message_success_counts_collisions_with_all_transmitters():
    log = TransmissionLog(entries=(_tx(1, 0.0), _tx(9, 0.2), _tx(1, 5.0, frame=1)))
    assert per_message_success(log, [1]) == pytest.approx(0.5)


def test_transmission_log_validates_intervals():
    with pytest.raises(ValueError):
        TransmissionLog(entries=(Transmission(tx_id=1, frame=0, slot_index=0, start=0.0, end=2 * SLOT),))
    with pytest.raises(ValueError):
        TransmissionLog(entries=(_tx(1, 0.0), _tx(1, 0.5)))


def test_empty_log_raises():
    with pytest.raises(NoTransmissionsError):
        per_message_success(TransmissionLog(entries=()), [1])
    with pytest.raises(NoTransmissionsError):
        delivery_ratio(TransmissionLog(entries=(_tx(1, 0.0),)), [2])


def test_wilson_interval_brackets_estimate():
    low, high = wilson_interval(50, 100)
    assert low < 0.5 < high
    assert 0.5 - low == pytest.approx(high - 0.5)
    assert wilson_interval(0, 10)[0] == pytest.approx(0.0, abs=1e-12)
    assert wilson_interval(10, 10)[1] == pytest.approx(1.0, abs=1e-12)


def test_estimate_success_modes():
    theory = estimate_success("theory", 20, 4, 1000, seed=0)
    assert theory.rate == theory.ci_low == theory.ci_high
    sync = estimate_success("sync", 20, 4, 20_000, seed=0)
    assert sync.ci_low <= sync.rate <= sync.ci_high
    assert abs(sync.rate - theory.rate) < 0.02


def test_latency_report():
    assert frame_duration(20) == pytest.approx(0.112)
    assert update_rate_hz(20) == pytest.approx(1 / 0.112)
    assert math.isclose(update_rate_hz(20), 8.93, abs_tol=0.01)
