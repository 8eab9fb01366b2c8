"""Agent dynamics: single integrator and Dubins car, plus action projection."""

import numpy as np


def wrap_angle(theta):
    """Wrap an angle into (-pi, pi]."""
    return np.pi - np.mod(np.pi - theta, 2.0 * np.pi)


def clamp_position(spec, state):
    """Clamp the (x, y) part of a state into the maze bounds."""
    state = np.array(state, dtype=np.float64)
    state[0] = min(max(state[0], spec.bounds.x_min), spec.bounds.x_max)
    state[1] = min(max(state[1], spec.bounds.y_min), spec.bounds.y_max)
    return state


def linear_step(spec, state, action, dt=None):
    """Euler step of ``x' = v_x, y' = v_y``, then clamp to the bounds.

    :param action: Velocity ``(v_x, v_y)`` already projected onto the unit disk.
    """
    dt = spec.dt if dt is None else dt
    x, y = state[0], state[1]
    return clamp_position(spec, (x + action[0] * dt, y + action[1] * dt))


def dubins_step(spec, state, action, dt=None):
    """Euler step of the Dubins car ``(x, y, theta, v)`` driven by ``(u_theta, u_v)``.

    Position integrates with the current heading and speed, then heading and speed update.
    """
    dt = spec.dt if dt is None else dt
    x, y, theta, speed = state
    u_theta = min(max(action[0], -spec.u_theta_max), spec.u_theta_max)
    u_v = min(max(action[1], -spec.u_v_max), spec.u_v_max)
    x = x + speed * np.cos(theta) * dt
    y = y + speed * np.sin(theta) * dt
    theta = wrap_angle(theta + u_theta * dt)
    speed = min(max(speed + u_v * dt, 0.0), spec.v_max)
    return clamp_position(spec, (x, y, theta, speed))


def project_action(spec, squashed):
    """Map a policy action in (-1, 1)^2 to the dynamics' action.

    Linear mode rescales radially onto the unit disk; Dubins mode scales each axis by its bound.
    """
    squashed = np.asarray(squashed, dtype=np.float64)
    if spec.dynamics == "linear":
        norm = np.linalg.norm(squashed)
        return squashed / norm if norm > 1.0 else squashed.copy()
    return squashed * np.array([spec.u_theta_max, spec.u_v_max])


def step_dynamics(spec, state, applied_action):
    """Dispatch to the dynamics model named by the maze spec."""
    if spec.dynamics == "linear":
        return linear_step(spec, state, applied_action)
    return dubins_step(spec, state, applied_action)


def observe(spec, state):
    """Network input for a state: positions scaled to [-1, 1], heading as (cos, sin), v/v_max."""
    bounds = spec.bounds
    px = 2.0 * (state[0] - bounds.x_min) / (bounds.x_max - bounds.x_min) - 1.0
    py = 2.0 * (state[1] - bounds.y_min) / (bounds.y_max - bounds.y_min) - 1.0
    if spec.dynamics == "linear":
        return np.array([px, py])
    return np.array([px, py, np.cos(state[2]), np.sin(state[2]), state[3] / spec.v_max])


def observation_dim(spec):
    """Length of :func:`observe` output."""
    return 2 if spec.dynamics == "linear" else 5
