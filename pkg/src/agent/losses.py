"""Soft-Q, risk-critic and risk-penalized actor losses with their gradients.

Every loss takes its standard-normal noise explicitly, so for fixed noise it is a deterministic
function of the network parameters. Bootstrap targets are constants: no gradient flows into
target networks or into the policy through them.
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.agent.nets import critic_input, policy_sample
from src.nn.gaussian import squashed_gaussian_backward
from src.nn.mlp import NetParams, mlp_backward, mlp_forward, mlp_forward_cached


@dataclass
class LossResult:
    """A scalar loss, gradients per trainable network and some batch statistics."""

    loss: float
    grads: Dict[str, NetParams]
    stats: Dict[str, float] = field(default_factory=dict)


def _next_action(nets, batch, noise_next):
    action, log_prob, _, _, _ = policy_sample(nets, batch["s_next"], batch["delta"], noise_next)
    return action, log_prob


def _squared_error(params, inputs, target):
    """``0.5 * mean((f(x) - target)^2)`` and its parameter gradient."""
    output, cache = mlp_forward_cached(params, inputs)
    diff = output[:, 0] - target
    loss = 0.5 * float(np.mean(diff ** 2))
    grads, _ = mlp_backward(params, inputs, diff[:, None] / len(diff), cache)
    return loss, grads, output[:, 0]


def q_targets(nets, batch, noise_next):
    """Soft Bellman targets ``R + gamma (1 - done) (min Q_target(s', a') - alpha log pi)``."""
    next_action, next_log_prob = _next_action(nets, batch, noise_next)
    x_next = critic_input(nets, batch["s_next"], next_action, batch["delta"])
    q_next = np.minimum(mlp_forward(nets.q1_target, x_next)[:, 0],
                        mlp_forward(nets.q2_target, x_next)[:, 0])
    soft_value = q_next - nets.alpha * next_log_prob
    return batch["reward"] + nets.gamma * (1.0 - batch["done"]) * soft_value


def q_loss(nets, batch, noise_next):
    """Soft Bellman residual of both Q critics.

    :return: LossResult whose loss is the sum of the two critics' losses and whose grads hold
        ``q1`` and ``q2``.
    """
    target = q_targets(nets, batch, noise_next)
    x = critic_input(nets, batch["s"], batch["a"], batch["delta"])
    loss1, grads1, q1 = _squared_error(nets.q1, x, target)
    loss2, grads2, q2 = _squared_error(nets.q2, x, target)
    return LossResult(loss1 + loss2, {"q1": grads1, "q2": grads2},
                      {"q1_loss": loss1, "q2_loss": loss2,
                       "mean_q": float(np.mean(np.minimum(q1, q2)))})


def risk_targets(nets, batch, noise_next):
    """Recursive execution-risk targets ``r_b + (1 - r_b)(1 - done) Q_er_target(s', a')``."""
    next_action, _ = _next_action(nets, batch, noise_next)
    x_next = critic_input(nets, batch["s_next"], next_action, batch["delta"])
    risk_next = mlp_forward(nets.risk_target, x_next)[:, 0]
    r_b = batch["r_b"]
    return r_b + (1.0 - r_b) * (1.0 - batch["done"]) * risk_next


def risk_critic_loss(nets, batch, noise_next):
    """L2 loss of the risk critic to its bootstrapped execution-risk target."""
    target = risk_targets(nets, batch, noise_next)
    x = critic_input(nets, batch["s"], batch["a"], batch["delta"])
    loss, grads, estimate = _squared_error(nets.risk, x, target)
    return LossResult(loss, {"risk": grads}, {"mean_risk_estimate": float(np.mean(estimate))})


def policy_loss(nets, batch, lambda_er, noise):
    """Entropy-regularized actor loss with the risk-bound penalty.

    ``mean(alpha log pi(a|s, delta) - min Q(s, a, delta) + lambda_er ReLU(Q_er(s, a, delta)
    - delta))`` with ``a`` reparameterized; gradients reach the policy through the action.
    """
    obs, delta = batch["s"], batch["delta"]
    batch_size = obs.shape[0]
    action, log_prob, head, mask, policy_cache = policy_sample(nets, obs, delta, noise)
    x = critic_input(nets, obs, action, delta)
    ones = np.ones((batch_size, 1))

    q1, q1_cache = mlp_forward_cached(nets.q1, x)
    q2, q2_cache = mlp_forward_cached(nets.q2, x)
    q_min = np.minimum(q1[:, 0], q2[:, 0])
    _, dq1_dx = mlp_backward(nets.q1, x, ones, q1_cache)
    _, dq2_dx = mlp_backward(nets.q2, x, ones, q2_cache)
    dq_min_dx = np.where((q1[:, 0] <= q2[:, 0])[:, None], dq1_dx, dq2_dx)

    risk, risk_cache = mlp_forward_cached(nets.risk, x)
    excess = risk[:, 0] - delta
    active = (excess > 0.0).astype(np.float64)
    penalty = lambda_er * np.maximum(excess, 0.0)

    loss = float(np.mean(nets.alpha * log_prob - q_min + penalty))
    grad_x = -dq_min_dx
    if lambda_er and active.any():
        _, drisk_dx = mlp_backward(nets.risk, x, ones, risk_cache)
        grad_x = grad_x + lambda_er * active[:, None] * drisk_dx
    start = nets.obs_dim
    grad_action = grad_x[:, start:start + nets.action_dim] / batch_size
    grad_log_prob = np.full(batch_size, nets.alpha / batch_size)

    grad_mean, grad_log_std = squashed_gaussian_backward(head, noise, action, grad_action,
                                                         grad_log_prob)
    upstream = np.hstack([grad_mean, grad_log_std * mask])
    grads, _ = mlp_backward(nets.policy, None, upstream, policy_cache)
    return LossResult(loss, {"policy": grads},
                      {"mean_log_prob": float(np.mean(log_prob)),
                       "penalty_active_fraction": float(np.mean(active)),
                       "mean_penalty": float(np.mean(penalty))})
