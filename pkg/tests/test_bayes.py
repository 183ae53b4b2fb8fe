import numpy as np
import pytest

from lumicell.exceptions import InconsistentObservationError, UnknownBeaconError
from lumicell.gpr.maps import IntensityMapSet
from lumicell.localization.bayes import (
    BayesFilter,
    BeliefGrid,
    Observation,
    Reading,
    init_belief,
    likelihood,
    likelihood_raster,
    log_likelihood_raster,
    map_estimate,
    predict_step,
    update_step,
)
from lumicell.models import GPHyperparams, GridSpec, MotionParams


@pytest.fixture
def maps() -> IntensityMapSet:
    """Карты 11×11 с шагом 0.1: маяк 1 растёт по x, маяк 2 по y."""
    grid = GridSpec.from_extent(0.0, 0.0, 1.0, 1.0, 0.1)
    gx, gy = np.meshgrid(grid.xs(), grid.ys())
    variance = np.full(grid.shape, 0.01)
    return IntensityMapSet(
        grid=grid,
        mean={1: gx, 2: gy},
        variance={1: variance, 2: variance.copy()},
        latent_variance={1: variance * 0.5, 2: variance * 0.5},
        hp=GPHyperparams(sigma_f2=1.0, length_scale=1.0, sigma_n2=0.005),
    )


def _obs(**rss: float) -> Observation:
    return Observation(t=0.0, readings={int(key[1:]): Reading(rss=value) for key, value in rss.items()})


def test_uniform_prior(maps):
    belief = init_belief(maps.grid)
    assert belief.p.shape == (11, 11)
    assert np.allclose(belief.p, 1.0 / 121)


def test_update_peaks_at_matching_cell(maps):
    belief = update_step(init_belief(maps.grid), maps, _obs(b1=0.3, b2=0.7))
    estimate = map_estimate(belief)
    assert estimate.position == pytest.approx((0.3, 0.7))
    assert belief.p.sum() == pytest.approx(1.0)
    assert estimate.mass > 1.0 / 121


def test_predict_without_motion_is_identity(maps):
    belief = update_step(init_belief(maps.grid), maps, _obs(b1=0.3, b2=0.7))
    assert predict_step(belief, MotionParams(sigma_move=0.0)) is belief


def test_predict_spreads_and_keeps_mass(maps):
    belief = update_step(init_belief(maps.grid), maps, _obs(b1=0.5, b2=0.5))
    spread = predict_step(belief, MotionParams(sigma_move=0.1))
    assert spread.p.sum() == pytest.approx(1.0)
    assert spread.p.max() < belief.p.max()
    assert map_estimate(spread).position == pytest.approx((0.5, 0.5))


def test_unknown_beacon_is_rejected(maps):
    with pytest.raises(UnknownBeaconError) as exc_info:
        update_step(init_belief(maps.grid), maps, _obs(b1=0.3, b9=0.1))
    assert exc_info.value.details["beacon_ids"] == [9]


def test_underflow_falls_back_to_log_space(maps):
    belief = update_step(init_belief(maps.grid), maps, _obs(b1=50.0))
    assert belief.p.sum() == pytest.approx(1.0)
    # при одном маяке все строки равновероятны, побеждает первая
    assert map_estimate(belief).position == pytest.approx((1.0, 0.0))


def test_infinite_reading_is_inconsistent(maps):
    with pytest.raises(InconsistentObservationError):
        update_step(init_belief(maps.grid), maps, _obs(b1=float("inf")))


def test_unclean_readings_are_ignored(maps):
    noisy = Observation(t=1.0, readings={1: Reading(rss=0.3), 2: Reading(rss=0.9, clean=False)})
    np.testing.assert_allclose(log_likelihood_raster(maps, noisy), log_likelihood_raster(maps, _obs(b1=0.3)))


def test_empty_observation_keeps_belief(maps):
    belief = update_step(init_belief(maps.grid), maps, Observation(t=0.0))
    assert np.allclose(belief.p, 1.0 / 121)


def test_point_likelihood_matches_raster(maps):
    obs = _obs(b1=0.4, b2=0.2)
    raster = likelihood_raster(maps, obs)
    for row, col in [(0, 0), (2, 4), (7, 3), (10, 10)]:
        cell = maps.grid.position(row, col)
        assert likelihood(maps, obs, cell) == pytest.approx(raster[row, col], rel=1e-9)


def test_map_estimate_tie_takes_first_node(maps):
    estimate = map_estimate(init_belief(maps.grid))
    assert estimate.position == (0.0, 0.0)
    assert estimate.mass == pytest.approx(1.0 / 121)


def test_belief_grid_validation(maps):
    grid = maps.grid
    with pytest.raises(ValueError):
        BeliefGrid(grid=grid, p=np.full((3, 3), 1.0 / 9))
    negative = np.full(grid.shape, 1.0 / 120)
    negative[0, 0] = -1.0 / 120
    with pytest.raises(ValueError):
        BeliefGrid(grid=grid, p=negative)
    with pytest.raises(ValueError):
        BeliefGrid(grid=grid, p=np.full(grid.shape, 0.5))


def test_reading_rejects_negative_rss():
    with pytest.raises(ValueError):
        Reading(rss=-0.1)


def test_mismatched_grids_are_rejected(maps):
    other = init_belief(GridSpec.from_extent(0.0, 0.0, 2.0, 2.0, 0.1))
    with pytest.raises(ValueError):
        update_step(other, maps, _obs(b1=0.3))


def test_filter_tracks_and_resets(maps):
    bayes = BayesFilter(maps, MotionParams(sigma_move=0.05))
    for _ in range(3):
        estimate = bayes.step(_obs(b1=0.6, b2=0.2))
    assert estimate.position == pytest.approx((0.6, 0.2))
    bayes.reset()
    assert np.allclose(bayes.belief.p, 1.0 / 121)


def test_constant_likelihood_factor_does_not_move_the_estimate(maps):
    # Маяк с постоянной картой умножает правдоподобие всех клеток на одну константу.
    flat = np.full(maps.grid.shape, 0.5)
    scaled = IntensityMapSet(
        grid=maps.grid,
        mean={**maps.mean, 3: flat},
        variance={**maps.variance, 3: np.full(maps.grid.shape, 0.01)},
        latent_variance={**maps.latent_variance, 3: np.full(maps.grid.shape, 0.005)},
        hp=maps.hp,
    )
    prior = update_step(init_belief(maps.grid), maps, _obs(b1=0.2, b2=0.4))

    plain = update_step(prior, maps, _obs(b1=0.6, b2=0.3))
    for rss in (0.5, 0.9, 3.0):
        with_constant = update_step(prior, scaled, _obs(b1=0.6, b2=0.3, b3=rss))
        np.testing.assert_allclose(with_constant.p, plain.p, rtol=1e-9, atol=1e-15)
        assert map_estimate(with_constant).position == map_estimate(plain).position


def test_belief_converges_at_noiseless_static_point(maps):
    bayes = BayesFilter(maps, MotionParams(sigma_move=0.0))
    obs = _obs(b1=0.3, b2=0.7)
    changes = []
    previous = bayes.belief.p
    for _ in range(60):
        estimate = bayes.step(obs)
        changes.append(float(np.max(np.abs(bayes.belief.p - previous))))
        previous = bayes.belief.p

    assert estimate.position == pytest.approx((0.3, 0.7))
    assert estimate.mass > 1.0 - 1e-6
    assert changes[-1] < 1e-9
    assert changes[-1] < changes[0]
