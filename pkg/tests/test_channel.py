import math

import numpy as np
import pytest

from lumicell.channel.optical import channel_gain, gain_field, normalized_tx_power, rss_model, superpose
from lumicell.exceptions import DegenerateGeometryError, SampleRateMismatchError
from lumicell.models import Luminaire, ReceiverModel
from lumicell.phy.waveform import Waveform


def test_gain_directly_below_luminaire():
    lum = Luminaire(id=1, position=(0.0, 0.0, 2.0))
    rx = ReceiverModel(position=(0.0, 0.0, 0.0))
    assert channel_gain(lum, rx) == pytest.approx(2.0 / (2.0 * math.pi * 4.0))


def test_normalized_power_gives_unit_rss_below():
    lum = Luminaire(id=1, position=(1.0, 1.0, 2.37), tx_power=normalized_tx_power(2.37))
    assert rss_model(lum, ReceiverModel(position=(1.0, 1.0, 0.0))) == pytest.approx(1.0)


def test_gain_decreases_with_horizontal_distance():
    lum = Luminaire(id=1, position=(0.0, 0.0, 2.5))
    gains = [channel_gain(lum, ReceiverModel(position=(x, 0.0, 0.0))) for x in (0.0, 0.5, 1.0, 2.0)]
    assert gains == sorted(gains, reverse=True)
    assert all(g > 0 for g in gains)


def test_outside_field_of_view_is_zero():
    lum = Luminaire(id=1, position=(3.0, 0.0, 1.0))
    rx = ReceiverModel(position=(0.0, 0.0, 0.0), fov_half_angle=math.radians(30.0))
    assert channel_gain(lum, rx) == 0.0


def test_luminaire_behind_receiver_is_zero():
    lum = Luminaire(id=1, position=(0.0, 0.0, -1.0))
    assert channel_gain(lum, ReceiverModel(position=(0.0, 0.0, 0.0))) == 0.0


def test_coinciding_positions_raise():
    lum = Luminaire(id=7, position=(1.0, 1.0, 0.0))
    with pytest.raises(DegenerateGeometryError) as exc_info:
        channel_gain(lum, ReceiverModel(position=(1.0, 1.0, 0.0)))
    assert exc_info.value.details["beacon_id"] == 7


def test_orientation_vectors_are_normalized():
    lum = Luminaire(id=1, position=(0.0, 0.0, 2.0), normal=(0.0, 0.0, -5.0))
    assert lum.normal == (0.0, 0.0, -1.0)
    with pytest.raises(ValueError):
        ReceiverModel(normal=(0.0, 0.0, 0.0))


def test_gain_field_matches_pointwise_gain():
    lums = [Luminaire(id=i + 1, position=(x, 0.0, 2.0)) for i, x in enumerate((0.0, 2.0))]
    rx = ReceiverModel()
    points = np.array([[0.0, 0.0], [1.0, 0.5], [2.0, 1.0]])
    field = gain_field(lums, rx, points)
    assert field.shape == (3, 2)
    for i, (x, y) in enumerate(points):
        for j, lum in enumerate(lums):
            assert field[i, j] == pytest.approx(channel_gain(lum, rx.at(x, y)))


def test_superpose_aligns_on_start_sample():
    a = Waveform(samples=np.array([1.0, 1.0]), sample_rate=10.0, start_sample=0)
    b = Waveform(samples=np.array([1.0, 1.0]), sample_rate=10.0, start_sample=1)
    total = superpose([(a, 1.0), (b, 2.0)], noise_sigma=0.0, seed=0)
    assert total.samples.tolist() == [1.0, 3.0, 2.0]
    assert total.start_sample == 0


def test_superpose_noise_is_seeded():
    a = Waveform(samples=np.zeros(100), sample_rate=10.0)
    first = superpose([(a, 1.0)], noise_sigma=0.1, seed=4)
    second = superpose([(a, 1.0)], noise_sigma=0.1, seed=4)
    np.testing.assert_array_equal(first.samples, second.samples)
    assert first.samples.std() > 0


def test_superpose_validates_inputs():
    a = Waveform(samples=np.zeros(4), sample_rate=10.0)
    b = Waveform(samples=np.zeros(4), sample_rate=20.0)
    with pytest.raises(SampleRateMismatchError):
        superpose([(a, 1.0), (b, 1.0)], noise_sigma=0.0, seed=0)
    with pytest.raises(ValueError):
        superpose([(a, 1.0)], noise_sigma=-1.0, seed=0)
    with pytest.raises(ValueError):
        superpose([(a, -1.0)], noise_sigma=0.0, seed=0)
