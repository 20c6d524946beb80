"""System model, seeded streams, and trajectory simulation."""

import numpy as np
import pytest

from topoid.errors import InvalidInputError
from topoid.matops import solve_discrete_lyapunov
from topoid.system import (
    LtiSystem,
    RngStream,
    Trajectory,
    invariant_covariance,
    sample_initial_state,
    simulate,
)

ROTATION = np.array([[0.0, -0.9], [0.9, 0.0]])


def test_rng_stream_replays_from_top():
    stream = RngStream(seed=42, stream_id=3)
    a = stream.generator().standard_normal(8)
    b = stream.generator().standard_normal(8)
    np.testing.assert_array_equal(a, b)


def test_rng_streams_differ_by_id_and_seed():
    base = RngStream(seed=42).generator().standard_normal(8)
    other_id = RngStream(seed=42, stream_id=1).generator().standard_normal(8)
    other_seed = RngStream(seed=43).generator().standard_normal(8)
    assert not np.array_equal(base, other_id)
    assert not np.array_equal(base, other_seed)


def test_rng_stream_validation():
    with pytest.raises(InvalidInputError):
        RngStream(seed=-1)
    with pytest.raises(InvalidInputError):
        RngStream(seed=2**64)
    with pytest.raises(InvalidInputError):
        RngStream(seed=1.5)
    RngStream(seed=2**64 - 1, stream_id=2**64 - 1)


def test_lti_system_validates_inputs():
    with pytest.raises(InvalidInputError, match="stable"):
        LtiSystem(np.eye(2), np.eye(2))
    with pytest.raises(InvalidInputError, match="symmetric"):
        LtiSystem(ROTATION, np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError, match="positive definite"):
        LtiSystem(ROTATION, np.diag([1.0, 0.0]))
    with pytest.raises(InvalidInputError):
        LtiSystem(ROTATION, np.eye(3))


def test_lti_system_arrays_are_frozen_copies():
    theta = np.array([[0.5]])
    sys = LtiSystem(theta, np.eye(1))
    theta[0, 0] = 99.0
    assert sys.theta[0, 0] == 0.5
    with pytest.raises(ValueError):
        sys.theta[0, 0] = 0.0
    assert sys.dim == 1


def test_invariant_covariance_closed_forms():
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    assert invariant_covariance(sys)[0, 0] == 4.0 / 3.0

    sys2 = LtiSystem(ROTATION, np.eye(2))
    np.testing.assert_allclose(
        invariant_covariance(sys2), np.eye(2) / 0.19, rtol=1e-12
    )

    # general case against the solver directly
    theta = np.array([[0.6, 0.2], [-0.1, 0.3]])
    cov = np.array([[2.0, 0.3], [0.3, 1.0]])
    sys3 = LtiSystem(theta, cov)
    np.testing.assert_array_equal(
        invariant_covariance(sys3), solve_discrete_lyapunov(theta, cov)
    )


def test_trajectory_is_read_only_copy():
    raw = np.zeros((3, 2))
    traj = Trajectory(raw)
    raw[0, 0] = 5.0
    assert traj.states[0, 0] == 0.0
    assert traj.horizon == 2
    assert traj.dim == 2
    with pytest.raises(ValueError):
        traj.states[0, 0] = 1.0
    with pytest.raises(InvalidInputError):
        Trajectory(np.array([[np.inf, 0.0]]))
    with pytest.raises(InvalidInputError):
        Trajectory(np.zeros(3))


def test_simulate_deterministic_replay():
    sys = LtiSystem(ROTATION, np.eye(2))
    stream = RngStream(seed=7, stream_id=5)
    a = simulate(sys, 50, stream)
    b = simulate(sys, 50, stream)
    assert a.states.tobytes() == b.states.tobytes()
    assert a.horizon == 50


def test_simulate_zero_horizon():
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    traj = simulate(sys, 0, RngStream(seed=1))
    assert traj.states.shape == (1, 1)


def test_simulate_noise_free_decay():
    """With the noise switched off the path is exactly theta^t x0."""
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    traj = simulate(
        sys, 10, RngStream(seed=0), init_mode="fixed",
        x0=np.array([1.0]), noise_scale=0.0,
    )
    np.testing.assert_array_equal(traj.states[:, 0], 0.5 ** np.arange(11))


def test_simulate_init_mode_rules():
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    stream = RngStream(seed=3)
    with pytest.raises(InvalidInputError):
        simulate(sys, 5, stream, init_mode="warm")
    with pytest.raises(InvalidInputError):
        simulate(sys, 5, stream, init_mode="fixed")
    with pytest.raises(InvalidInputError):
        simulate(sys, 5, stream, x0=np.array([1.0]))
    with pytest.raises(InvalidInputError):
        simulate(sys, 5, stream, init_mode="fixed", x0=np.array([1.0, 2.0]))
    with pytest.raises(InvalidInputError):
        simulate(sys, -1, stream)
    with pytest.raises(InvalidInputError):
        simulate(sys, 5, stream, noise_scale=-0.5)


def test_simulate_standard_normal_init_ignores_invariant_cache():
    sys = LtiSystem(np.array([[0.9]]), np.array([[4.0]]))
    traj = simulate(sys, 0, RngStream(seed=11), init_mode="standard_normal")
    expect = RngStream(seed=11).generator().standard_normal(1)
    np.testing.assert_array_equal(traj.states[0], expect)


def test_sample_initial_state_matches_stationary_start():
    sys = LtiSystem(ROTATION, np.diag([2.0, 0.5]))
    stream = RngStream(seed=19, stream_id=2)
    x = sample_initial_state(sys, stream)
    traj = simulate(sys, 0, stream, init_mode="stationary")
    np.testing.assert_array_equal(traj.states[0], x)


def test_sample_initial_state_covariance():
    """Empirical second moment over many streams approaches S."""
    sys = LtiSystem(ROTATION, np.eye(2))
    draws = np.array([
        sample_initial_state(sys, RngStream(seed=101, stream_id=i))
        for i in range(20_000)
    ])
    emp = draws.T @ draws / draws.shape[0]
    np.testing.assert_allclose(emp, np.eye(2) / 0.19, rtol=0.05, atol=0.05)


def test_long_run_covariance_is_stationary():
    """Time average of x x^T over one long path stays near S."""
    theta = np.array([[0.6, 0.2], [-0.1, 0.3]])
    sys = LtiSystem(theta, np.eye(2))
    traj = simulate(sys, 100_000, RngStream(seed=23))
    states = traj.states
    emp = states.T @ states / states.shape[0]
    S = invariant_covariance(sys)
    np.testing.assert_allclose(emp, S, rtol=0.05, atol=0.02)


def test_noise_scale_scales_fluctuations():
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    stream = RngStream(seed=31)
    big = simulate(sys, 200, stream, init_mode="fixed",
                   x0=np.array([0.0]), noise_scale=2.0)
    small = simulate(sys, 200, stream, init_mode="fixed",
                     x0=np.array([0.0]), noise_scale=1.0)
    np.testing.assert_allclose(big.states, 2.0 * small.states, rtol=1e-12)


def test_warm_up_returns_self():
    sys = LtiSystem(np.array([[0.5]]), np.eye(1))
    assert sys.warm_up() is sys
    assert "LtiSystem" in repr(sys)
