import math

import numpy as np
import pytest

from app.core.errors import ModelValidationError, ZeroHorizonError
from app.models.markov import Observable
from app.models.simulation import Trajectory
from app.services.simulation_service import SimulationService
from app.services.tilted_service import TiltedService
from conftest import TWO_STATE_Q, make_model


def test_zero_horizon_trajectory(two_state):
    traj = SimulationService.sample_trajectory(two_state, 0.0, np.random.default_rng(0))
    assert traj.states.tolist() == [0]
    assert traj.entry_times.tolist() == [0.0]
    with pytest.raises(ZeroHorizonError):
        SimulationService.time_average(traj, two_state.f)
    with pytest.raises(ModelValidationError):
        SimulationService.sample_trajectory(two_state, -1.0, np.random.default_rng(0))


def test_time_average_on_fixed_paths(two_state):
    single = Trajectory(entry_times=np.array([0.0]), states=np.array([1]), horizon=4.0)
    assert SimulationService.time_average(single, two_state.f) == pytest.approx(-2.0)

    split = Trajectory(entry_times=np.array([0.0, 2.0]), states=np.array([0, 1]), horizon=4.0)
    assert SimulationService.time_average(split, two_state.f) == pytest.approx(-0.5)
    assert SimulationService.occupation_fractions(split, 2).tolist() == [0.5, 0.5]

    constant = Observable(values=np.array([3.0, 3.0]))
    traj = SimulationService.sample_trajectory(two_state, 10.0, np.random.default_rng(1))
    assert SimulationService.time_average(traj, constant) == pytest.approx(3.0, rel=1e-12)


def test_trajectory_is_well_formed(birth_death):
    traj = SimulationService.sample_trajectory(birth_death, 50.0, np.random.default_rng(2))
    assert traj.entry_times[0] == 0.0
    assert np.all(np.diff(traj.entry_times) > 0)
    assert traj.entry_times[-1] < 50.0
    # solo saltos con tasa positiva
    for x, y in zip(traj.states[:-1], traj.states[1:]):
        assert x != y and birth_death.q.rates[x, y] > 0
    assert traj.segment_lengths.sum() == pytest.approx(50.0)


def test_first_holding_time_is_exponential(two_state):
    rng = np.random.default_rng(3)
    count = 2000
    firsts = []
    for _ in range(count):
        traj = SimulationService.sample_trajectory(two_state, 20.0, rng)
        firsts.append(traj.segment_lengths[0])
    # arranque en el estado 0 con q_0 = 1
    assert abs(np.mean(firsts) - 1.0) <= 4.0 / math.sqrt(count)


def test_occupation_and_jump_statistics(birth_death):
    traj = SimulationService.sample_trajectory(birth_death, 5000.0, np.random.default_rng(4))
    fractions = SimulationService.occupation_fractions(traj, 3)
    assert np.allclose(fractions, birth_death.pi.weights, atol=0.03)

    stats = SimulationService.jump_statistics(traj, 3)
    middle = stats.holding_times[1]
    assert abs(np.mean(middle) - 0.5) <= 4.0 * 0.5 / math.sqrt(len(middle))
    leaving = stats.transition_counts[1]
    share = leaving[0] / leaving.sum()
    assert abs(share - 0.5) <= 4.0 * 0.5 / math.sqrt(leaving.sum())
    assert stats.transition_counts[0, 2] == 0 and stats.transition_counts[2, 0] == 0


def test_two_state_occupation_fraction(two_state):
    traj = SimulationService.sample_trajectory(two_state, 1e4, np.random.default_rng(5))
    assert abs(SimulationService.occupation_fractions(traj, 2)[0] - 2.0 / 3.0) <= 0.016


def test_time_averages_concentrate(two_state):
    integrals = SimulationService.sample_time_integrals(two_state, 1e4, 1000, seed=6, threads=2)
    averages = integrals / 1e4
    assert np.mean(np.abs(averages) < 0.05) >= 0.99


def test_block_streams_do_not_depend_on_threads(two_state):
    one = SimulationService.sample_time_integrals(two_state, 3.0, 1000, seed=9, threads=1, block_size=128)
    many = SimulationService.sample_time_integrals(two_state, 3.0, 1000, seed=9, threads=4, block_size=128)
    assert np.array_equal(one, many)
    other = SimulationService.sample_time_integrals(two_state, 3.0, 1000, seed=10, threads=1, block_size=128)
    assert not np.array_equal(one, other)


def test_empirical_tail_extremes(two_state):
    above = SimulationService.empirical_tail(two_state, 2.0, 1.5, 500, seed=1)
    assert above.p_hat == 0.0 and above.hits == 0
    assert above.interval == "wilson"
    assert above.ci_lo <= 1e-12 and above.ci_hi > 0.0

    everything = SimulationService.empirical_tail(two_state, 2.0, -2.0, 500, seed=1)
    assert everything.p_hat == 1.0
    assert everything.interval == "wilson"
    assert everything.ci_hi == pytest.approx(1.0) and everything.ci_lo < 1.0

    with pytest.raises(ZeroHorizonError):
        SimulationService.empirical_tail(two_state, 0.0, 0.1, 10, seed=1)


def test_tail_is_deterministic_across_threads(two_state):
    a = SimulationService.empirical_tail(two_state, 5.0, 0.3, 3000, seed=42, threads=1)
    b = SimulationService.empirical_tail(two_state, 5.0, 0.3, 3000, seed=42, threads=3)
    assert a == b


def test_tail_from_integrals_counts_threshold_exactly():
    integrals = np.array([0.0, 1.0, 2.0, 3.0])
    tail = SimulationService.tail_from_integrals(integrals, 2.0, 1.0, 1.0)
    assert tail.hits == 2
    assert tail.interval == "normal"
    assert tail.ci_lo <= tail.p_hat <= tail.ci_hi
    with pytest.raises(ZeroHorizonError):
        SimulationService.tail_from_integrals(integrals, 0.0, 1.0, 1.0)


def test_variance_rate_of_zero_observable():
    model = make_model(TWO_STATE_Q, [0.0, 0.0])
    assert SimulationService.empirical_variance_rate(model, 5.0, 100, seed=2) == 0.0
    with pytest.raises(ModelValidationError):
        SimulationService.empirical_variance_rate(model, 5.0, 1, seed=2)


def test_empirical_log_mgf(two_state_stationary, spectral):
    sd = spectral(two_state_stationary)
    estimate = SimulationService.empirical_log_mgf(two_state_stationary, 2.0, 0.0, 200, seed=3)
    assert estimate.value == pytest.approx(0.0, abs=1e-12)

    # arranque estacionario: log E_π e^{rA_t} ≤ t·λ₀(r)
    for r in (0.5, -0.5):
        estimate = SimulationService.empirical_log_mgf(two_state_stationary, 2.0, r, 20000, seed=3)
        lam = TiltedService.lambda0(sd, two_state_stationary.f, two_state_stationary.pi, r)
        assert estimate.std_error > 0
        assert estimate.value <= 2.0 * lam + 3.0 * estimate.std_error
