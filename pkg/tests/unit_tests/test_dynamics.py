"""Tests for the single integrator and Dubins car models."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.env.dynamics import (dubins_step, linear_step, observation_dim, observe,
                              project_action, wrap_angle)
from src.env.maze import MazeSpec, Rect


@pytest.fixture
def open_field():
    """Bounds wide enough that the examples never clamp."""
    return MazeSpec(name="Field", bounds=Rect(-10.0, 10.0, -10.0, 10.0), obstacles=(),
                    start=(0.0, 0.0), goal=(9.0, 9.0))


def test_linear_euler_step(open_field):
    """(0, 0) moved by (1, 0) for one second."""
    assert np.array_equal(linear_step(open_field, np.array([0.0, 0.0]), (1.0, 0.0)), [1.0, 0.0])


def test_linear_half_second(open_field):
    """(5, 5) with (0.6, -0.8) for half a second."""
    out = linear_step(open_field, np.array([5.0, 5.0]), (0.6, -0.8), dt=0.5)
    assert np.allclose(out, [5.3, 4.6], atol=1e-12)


def test_linear_clamps_to_bounds(one_obstacle):
    """The corner is a fixed point for outward motion."""
    action = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert np.array_equal(linear_step(one_obstacle, np.array([10.0, 10.0]), action), [10, 10])


def test_zero_action_is_fixed_point(one_obstacle):
    """No velocity, no motion."""
    state = np.array([2.5, 7.25])
    assert np.array_equal(linear_step(one_obstacle, state, (0.0, 0.0)), state)


def test_dubins_straight_motion(open_field):
    """Heading 0 at unit speed moves one meter along x."""
    spec = MazeSpec(name="F", dynamics="dubins", bounds=open_field.bounds, obstacles=(),
                    start=(0.0, 0.0), goal=(9.0, 9.0))
    out = dubins_step(spec, np.array([0.0, 0.0, 0.0, 1.0]), (0.0, 0.0))
    assert np.allclose(out, [1.0, 0.0, 0.0, 1.0], atol=1e-12)


def test_dubins_zero_speed_only_turns(dubins_maze):
    """At rest the heading rotates and the position stays."""
    out = dubins_step(dubins_maze, np.array([2.0, 2.0, 0.0, 0.0]), (0.5, 0.0))
    assert out[0] == 2.0 and out[1] == 2.0 and out[2] == pytest.approx(0.5)


def test_dubins_hand_arithmetic(open_field):
    """Position first, then heading and speed."""
    spec = MazeSpec(name="F", dynamics="dubins", bounds=open_field.bounds, obstacles=(),
                    start=(0.0, 0.0), goal=(9.0, 9.0))
    out = dubins_step(spec, np.array([0.0, 0.0, np.pi / 2, 1.0]), (0.5, -0.2))
    assert out[0] == pytest.approx(0.0, abs=1e-12)
    assert out[1] == pytest.approx(1.0)
    assert out[2] == pytest.approx(wrap_angle(np.pi / 2 + 0.5))
    assert out[3] == pytest.approx(0.8)


def test_wrap_angle_range():
    """Angles land in (-pi, pi]."""
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


def test_linear_projection_onto_unit_disk(one_obstacle):
    """Squashed actions outside the disk are rescaled radially."""
    projected = project_action(one_obstacle, np.array([0.9, 0.9]))
    assert np.linalg.norm(projected) == pytest.approx(1.0)
    assert projected[0] == pytest.approx(projected[1])
    inside = np.array([0.3, -0.4])
    assert np.array_equal(project_action(one_obstacle, inside), inside)


def test_dubins_projection_scales_axes(dubins_maze):
    """Dubins actions scale by the per-axis bounds."""
    assert np.allclose(project_action(dubins_maze, np.array([1.0, -1.0])), [1.0, -0.5])


def test_observation(one_obstacle, dubins_maze):
    """Positions scale to [-1, 1]; Dubins adds heading and speed features."""
    assert np.allclose(observe(one_obstacle, np.array([0.0, 10.0])), [-1.0, 1.0])
    obs = observe(dubins_maze, np.array([5.0, 5.0, np.pi / 2, 0.5]))
    assert np.allclose(obs, [0.0, 0.0, 0.0, 1.0, 0.5], atol=1e-12)
    assert observation_dim(one_obstacle) == 2 and observation_dim(dubins_maze) == 5


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_random_walks_stay_in_bounds(seed):
    """Long random action sequences keep states in bounds and headings wrapped."""
    spec = MazeSpec(name="Fuzz", dynamics="dubins", obstacles=())
    rng = np.random.Generator(np.random.Philox(seed))
    state = np.array([5.0, 5.0, 0.0, 0.0])
    for action in rng.uniform(-1.0, 1.0, (3000, 2)):
        state = dubins_step(spec, state, project_action(spec, action))
        assert 0.0 <= state[0] <= 10.0 and 0.0 <= state[1] <= 10.0
        assert -np.pi < state[2] <= np.pi
        assert 0.0 <= state[3] <= spec.v_max


def test_steps_are_deterministic(dubins_maze):
    """Identical inputs give bit-identical outputs."""
    state = np.array([1.0, 2.0, 0.3, 0.7])
    first = dubins_step(dubins_maze, state, (0.2, 0.1))
    second = dubins_step(dubins_maze, state, (0.2, 0.1))
    assert np.array_equal(first, second)
