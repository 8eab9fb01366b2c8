"""The agent's networks and how their inputs are assembled."""

from dataclasses import dataclass, replace

import numpy as np

from src.exceptions import RiskDomainError
from src.nn.gaussian import sample_squashed_gaussian, split_head
from src.nn.mlp import NetParams, init_mlp, mlp_forward_cached


@dataclass(frozen=True)
class RiskBound:
    """Upper bound on execution risk, always in [0, 1]."""

    delta: float

    def __post_init__(self):
        """Check the range."""
        if not 0.0 <= self.delta <= 1.0:
            raise RiskDomainError("Risk bound {} outside [0, 1]".format(self.delta))

    def __float__(self):
        """Numeric value."""
        return float(self.delta)


@dataclass(frozen=True)
class AgentNets:
    """Policy, twin soft-Q critics, risk critic and their targets.

    The policy reads ``obs + [delta]``; the critics read ``obs + action + [delta]`` or, with
    ``critic_uses_delta`` off, ``obs + action``.
    """

    policy: NetParams
    q1: NetParams
    q2: NetParams
    q1_target: NetParams
    q2_target: NetParams
    risk: NetParams
    risk_target: NetParams
    obs_dim: int
    action_dim: int
    alpha: float = 0.2
    gamma: float = 0.99
    critic_uses_delta: bool = True

    def networks(self):
        """Mapping of checkpoint name to parameters."""
        return {"policy": self.policy, "q1": self.q1, "q2": self.q2,
                "q1_target": self.q1_target, "q2_target": self.q2_target,
                "risk": self.risk, "risk_target": self.risk_target}

    def with_networks(self, **changes):
        """Copy with some networks replaced."""
        return replace(self, **changes)


def build_agent_nets(obs_dim, action_dim, hidden, rng, alpha=0.2, gamma=0.99,
                     critic_uses_delta=True):
    """Initialize every network; targets start as exact copies of their sources."""
    critic_in = obs_dim + action_dim + (1 if critic_uses_delta else 0)
    policy = init_mlp([obs_dim + 1, hidden, hidden, 2 * action_dim], rng, "linear")
    q1 = init_mlp([critic_in, hidden, hidden, 1], rng, "linear")
    q2 = init_mlp([critic_in, hidden, hidden, 1], rng, "linear")
    risk = init_mlp([critic_in, hidden, hidden, 1], rng, "sigmoid")
    return AgentNets(policy, q1, q2, q1.copy(), q2.copy(), risk, risk.copy(),
                     obs_dim, action_dim, alpha, gamma, critic_uses_delta)


def policy_input(obs, delta):
    """Stack observations with their risk bound column."""
    obs = np.atleast_2d(obs)
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), (obs.shape[0],))
    return np.hstack([obs, delta[:, None]])


def critic_input(nets, obs, action, delta):
    """Stack observation, action and (optionally) the risk bound."""
    obs = np.atleast_2d(obs)
    columns = [obs, np.atleast_2d(action)]
    if nets.critic_uses_delta:
        delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), (obs.shape[0],))
        columns.append(delta[:, None])
    return np.hstack(columns)


def policy_sample(nets, obs, delta, noise):
    """Reparameterized action and log-probability for a batch.

    :return: ``(action, log_prob, head, clamp_mask, forward_cache)``.
    """
    raw, cache = mlp_forward_cached(nets.policy, policy_input(obs, delta))
    head, mask = split_head(raw)
    action, log_prob = sample_squashed_gaussian(head, noise)
    return action, log_prob, head, mask, cache


def deterministic_action(nets, obs, delta):
    """``tanh(mean)`` for a single observation."""
    raw, _ = mlp_forward_cached(nets.policy, policy_input(obs, delta))
    head, _ = split_head(raw)
    return np.tanh(head.mean[0])
