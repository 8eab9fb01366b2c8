"""Episode lifecycle: reset, reward, stepping and rollouts."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.config import REJECTION_SAMPLING_TRIES
from src.env.dynamics import clamp_position, project_action, step_dynamics
from src.env.maze import in_collision
from src.exceptions import ConfigurationError

DONE_GOAL = "goal"
DONE_HORIZON = "horizon"


@dataclass
class StepResult:
    """Outcome of one environment step."""

    next_state: np.ndarray
    reward: float
    done: bool
    done_reason: Optional[str] = None


@dataclass
class Rollout:
    """States ``s_0..s_T``, squashed actions and rewards of one episode."""

    states: List[np.ndarray] = field(default_factory=list)
    actions: List[np.ndarray] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    done_reason: Optional[str] = None


def goal_distance(spec, state):
    """Euclidean distance from the state's position to the goal."""
    return float(np.hypot(state[0] - spec.goal[0], state[1] - spec.goal[1]))


def reached_goal(spec, state):
    """Whether the position is within the goal radius."""
    return goal_distance(spec, state) <= spec.goal_radius


def reward(prev_state, action, next_state, spec):
    """Step cost, terminal bonus and optional progress shaping.

    ``-step_cost + goal_bonus * [next within goal radius]
    + progress_coef * (dist(prev, goal) - dist(next, goal))``.
    """
    value = -spec.step_cost
    if reached_goal(spec, next_state):
        value += spec.goal_bonus
    if spec.progress_coef:
        value += spec.progress_coef * (goal_distance(spec, prev_state)
                                       - goal_distance(spec, next_state))
    return value


def initial_state(spec, position):
    """Full AgentState at a position, using the configured start heading and speed."""
    if spec.dynamics == "linear":
        return np.array([position[0], position[1]], dtype=np.float64)
    return np.array([position[0], position[1], spec.start_heading, spec.start_speed],
                    dtype=np.float64)


def reset(spec, start_mode=None, rng=None):
    """Draw the start state of an episode.

    :param start_mode: ``fixed`` or ``uniform_free``, defaults to the maze's own mode.
    :raises ConfigurationError: If no free point is found within the rejection budget.
    """
    start_mode = start_mode or spec.start_mode
    if start_mode == "fixed":
        return initial_state(spec, spec.start)
    if start_mode != "uniform_free":
        raise ConfigurationError("Unknown start mode '{}'".format(start_mode))
    if rng is None:
        raise ConfigurationError("uniform_free starts need a random generator")
    bounds = spec.bounds
    for _ in range(REJECTION_SAMPLING_TRIES):
        point = (rng.uniform(bounds.x_min, bounds.x_max), rng.uniform(bounds.y_min, bounds.y_max))
        if not in_collision(spec, point):
            return initial_state(spec, point)
    raise ConfigurationError("No collision-free start found in {} tries, maze {} is "
                             "over-full".format(REJECTION_SAMPLING_TRIES, spec.name))


def env_step(spec, state, squashed_action, t, rng=None):
    """Advance one step from time ``t``.

    :param squashed_action: Policy action in (-1, 1)^2, projected here.
    :param rng: Needed only when ``noise_in_transition`` is set.
    """
    next_state = step_dynamics(spec, state, project_action(spec, squashed_action))
    if spec.noise_in_transition and spec.sigma > 0:
        next_state[:2] += rng.normal(0.0, spec.sigma, size=2)
        next_state = clamp_position(spec, next_state)
    value = reward(state, squashed_action, next_state, spec)
    if reached_goal(spec, next_state):
        return StepResult(next_state, value, True, DONE_GOAL)
    if t + 1 >= spec.horizon:
        return StepResult(next_state, value, True, DONE_HORIZON)
    return StepResult(next_state, value, False)


def rollout(spec, policy_fn, start_state, rng=None):
    """Run ``policy_fn(state) -> squashed action`` from ``start_state`` to termination."""
    trace = Rollout(states=[np.array(start_state, dtype=np.float64)])
    state = trace.states[0]
    for t in range(spec.horizon):
        action = np.asarray(policy_fn(state), dtype=np.float64)
        result = env_step(spec, state, action, t, rng)
        trace.actions.append(action)
        trace.rewards.append(result.reward)
        trace.states.append(result.next_state)
        state = result.next_state
        if result.done:
            trace.done_reason = result.done_reason
            break
    return trace


def path_length(states):
    """Sum of Euclidean distances between consecutive positions."""
    positions = np.asarray(states, dtype=np.float64)[:, :2]
    if len(positions) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1)))
