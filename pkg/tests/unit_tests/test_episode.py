"""Tests for rewards, resets and episode stepping."""

import numpy as np
import pytest

from src.env.episode import (DONE_GOAL, DONE_HORIZON, env_step, path_length, reset, reward,
                             rollout)
from src.env.maze import MazeSpec, Rect, in_collision
from src.exceptions import ConfigurationError


def test_step_cost_away_from_goal(one_obstacle):
    """A plain step costs one."""
    result = env_step(one_obstacle, np.array([1.0, 5.0]), np.array([0.5, 0.0]), 0)
    assert result.reward == -1.0
    assert not result.done and result.done_reason is None


def test_reaching_goal_pays_bonus(one_obstacle):
    """Entering the goal disk gives -1 + 100 and ends the episode."""
    result = env_step(one_obstacle, np.array([8.0, 5.0]), np.array([0.999, 0.0]), 3)
    assert result.reward == pytest.approx(99.0)
    assert result.done and result.done_reason == DONE_GOAL


def test_zero_bonus():
    """Without a bonus the goal step costs like any other."""
    spec = MazeSpec(goal_bonus=0.0)
    assert reward(np.array([8.0, 5.0]), None, np.array([9.0, 5.0]), spec) == -1.0


def test_progress_shaping():
    """Progress adds the coefficient times the distance gained."""
    spec = MazeSpec(progress_coef=2.0)
    value = reward(np.array([1.0, 5.0]), None, np.array([2.0, 5.0]), spec)
    assert value == pytest.approx(-1.0 + 2.0)


def test_horizon_ends_episode(one_obstacle):
    """The step that reaches the horizon is terminal."""
    result = env_step(one_obstacle, np.array([1.0, 5.0]), np.array([0.0, 0.1]),
                      one_obstacle.horizon - 1)
    assert result.done and result.done_reason == DONE_HORIZON


def test_fixed_reset(one_obstacle, dubins_maze):
    """Fixed starts copy the configured point, Dubins adds heading and speed."""
    assert np.array_equal(reset(one_obstacle), [1.0, 5.0])
    assert np.array_equal(reset(dubins_maze), [1.0, 5.0, 0.0, 0.0])


def test_uniform_free_reset(one_obstacle, rng):
    """Random starts never land in an obstacle and stay in bounds."""
    for _ in range(200):
        state = reset(one_obstacle, "uniform_free", rng)
        assert not in_collision(one_obstacle, state)
        assert 0.0 <= state[0] <= 10.0 and 0.0 <= state[1] <= 10.0


def test_over_full_maze(rng):
    """A maze with no free room fails after the rejection budget."""
    blocked = MazeSpec(name="Full", obstacles=(Rect(0.0, 10.0, 0.0, 4.999999999),
                                               Rect(0.0, 10.0, 5.000000001, 10.0)))
    with pytest.raises(ConfigurationError):
        reset(blocked, "uniform_free", rng)


def test_uniform_free_needs_generator(one_obstacle):
    """Random starts need a generator."""
    with pytest.raises(ConfigurationError):
        reset(one_obstacle, "uniform_free")


def test_rollout_reaches_goal(empty_maze):
    """Driving straight right reaches the goal in eight steps."""
    trace = rollout(empty_maze, lambda state: np.array([0.999999, 0.0]), reset(empty_maze))
    assert trace.done_reason == DONE_GOAL
    assert len(trace.actions) == 8 and len(trace.states) == 9
    assert trace.rewards[-1] == pytest.approx(99.0)
    assert path_length(trace.states) == pytest.approx(8.0 * 0.999999)


def test_rollout_hits_horizon(one_obstacle):
    """Standing still runs out the horizon."""
    trace = rollout(one_obstacle, lambda state: np.zeros(2), reset(one_obstacle))
    assert trace.done_reason == DONE_HORIZON
    assert len(trace.actions) == one_obstacle.horizon
    assert sum(trace.rewards) == -one_obstacle.horizon
    assert path_length(trace.states) == 0.0


def test_transition_noise_is_seeded(rng):
    """Transition noise moves the agent and depends only on the generator."""
    spec = MazeSpec(noise_in_transition=True, sigma=0.3)
    first = env_step(spec, np.array([2.0, 2.0]), np.zeros(2), 0,
                     np.random.Generator(np.random.Philox(5)))
    second = env_step(spec, np.array([2.0, 2.0]), np.zeros(2), 0,
                      np.random.Generator(np.random.Philox(5)))
    assert np.array_equal(first.next_state, second.next_state)
    assert not np.array_equal(first.next_state, [2.0, 2.0])
