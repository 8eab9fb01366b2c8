"""Risk-conditioned soft actor critic: action selection and gradient updates."""

from dataclasses import dataclass

import daiquiri
import numpy as np

from src.agent.losses import policy_loss, q_loss, risk_critic_loss
from src.agent.nets import (AgentNets, RiskBound, build_agent_nets, deterministic_action,
                            policy_sample)
from src.config import HIDDEN_WIDTH, NETWORK_NAMES, TRAINABLE_NETWORKS
from src.exceptions import ConfigurationError, NumericalAbort
from src.nn.adam import AdamState, adam_step
from src.nn.checkpoint import load_checkpoint, save_checkpoint
from src.nn.mlp import polyak_update

_logger = daiquiri.getLogger(__name__)

STOCHASTIC = "stochastic"
DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class LearningRates:
    """One Adam learning rate per trainable network group."""

    q: float = 3e-4
    risk: float = 3e-4
    policy: float = 3e-4

    @classmethod
    def uniform(cls, lr):
        """Same rate for every group."""
        return cls(lr, lr, lr)


def select_action(nets, obs, delta, mode, rng=None):
    """Action in (-1, 1)^d for one observation; the environment projects it.

    ``deterministic`` returns ``tanh(mean)``, ``stochastic`` a reparameterized sample.
    """
    delta = float(RiskBound(delta))
    if mode == DETERMINISTIC:
        return deterministic_action(nets, obs, delta)
    if mode != STOCHASTIC:
        raise ConfigurationError("Unknown action mode '{}'".format(mode))
    noise = rng.standard_normal((1, nets.action_dim))
    action, _, _, _, _ = policy_sample(nets, obs, delta, noise)
    return action[0]


def init_optimizers(nets):
    """Fresh Adam states for the trainable networks."""
    return {name: AdamState.zeros_like(getattr(nets, name)) for name in TRAINABLE_NETWORKS}


def _check_finite(batch, diagnostics):
    bad = [name for name in ("q_loss", "risk_loss", "policy_loss")
           if not np.isfinite(diagnostics[name])]
    if bad:
        raise NumericalAbort("Non-finite loss in {}".format(", ".join(bad)), batch=batch,
                             diagnostics=diagnostics)


def update_step(nets, optimizers, buffer, batch_size, lrs, tau, lambda_er, rng):
    """One gradient phase: q1, q2, risk critic, policy, then Polyak-average the targets.

    :return: ``(nets, optimizers, diagnostics)``; with too few stored transitions the inputs
        come back unchanged and ``diagnostics["skipped"]`` is True.
    :raises NumericalAbort: If any loss is not finite (no update is applied).
    """
    if len(buffer) < batch_size:
        return nets, optimizers, {"skipped": True}
    batch = buffer.sample(batch_size, rng)
    noise_q = rng.standard_normal((batch_size, nets.action_dim))
    noise_risk = rng.standard_normal((batch_size, nets.action_dim))
    noise_pi = rng.standard_normal((batch_size, nets.action_dim))

    q_result = q_loss(nets, batch, noise_q)
    risk_result = risk_critic_loss(nets, batch, noise_risk)
    diagnostics = {"skipped": False, "q_loss": q_result.loss, "risk_loss": risk_result.loss,
                   "policy_loss": 0.0, "mean_q": q_result.stats["mean_q"],
                   "mean_risk_estimate": risk_result.stats["mean_risk_estimate"]}
    _check_finite(batch, diagnostics)

    optimizers = dict(optimizers)
    q1, optimizers["q1"] = adam_step(nets.q1, q_result.grads["q1"], optimizers["q1"], lrs.q)
    q2, optimizers["q2"] = adam_step(nets.q2, q_result.grads["q2"], optimizers["q2"], lrs.q)
    risk, optimizers["risk"] = adam_step(nets.risk, risk_result.grads["risk"],
                                         optimizers["risk"], lrs.risk)
    nets = nets.with_networks(q1=q1, q2=q2, risk=risk)

    pi_result = policy_loss(nets, batch, lambda_er, noise_pi)
    diagnostics["policy_loss"] = pi_result.loss
    diagnostics["penalty_active_fraction"] = pi_result.stats["penalty_active_fraction"]
    _check_finite(batch, diagnostics)
    policy, optimizers["policy"] = adam_step(nets.policy, pi_result.grads["policy"],
                                             optimizers["policy"], lrs.policy)

    nets = nets.with_networks(
        policy=policy,
        q1_target=polyak_update(nets.q1_target, nets.q1, tau),
        q2_target=polyak_update(nets.q2_target, nets.q2, tau),
        risk_target=polyak_update(nets.risk_target, nets.risk, tau))
    return nets, optimizers, diagnostics


class RiskConditionedSAC:
    """The agent: networks, optimizer states and update hyperparameters."""

    def __init__(self, nets, optimizers=None, lr=3e-4, tau=0.005, lambda_er=10.0):
        """Wrap existing networks; optimizers start fresh unless given."""
        self.nets = nets
        self.optimizers = optimizers or init_optimizers(nets)
        self.lrs = LearningRates.uniform(lr)
        self.tau = tau
        self.lambda_er = lambda_er

    @classmethod
    def create(cls, obs_dim, action_dim, rng, hidden=HIDDEN_WIDTH, alpha=0.2, gamma=0.99,
               lr=3e-4, tau=0.005, lambda_er=10.0, critic_uses_delta=True):
        """Initialize a new agent."""
        nets = build_agent_nets(obs_dim, action_dim, hidden, rng, alpha, gamma,
                                critic_uses_delta)
        return cls(nets, None, lr, tau, lambda_er)

    def select_action(self, obs, delta, mode=DETERMINISTIC, rng=None):
        """See :func:`select_action`."""
        return select_action(self.nets, obs, delta, mode, rng)

    def update_step(self, buffer, batch_size, rng):
        """Run one gradient phase in place and return its diagnostics."""
        self.nets, self.optimizers, diagnostics = update_step(
            self.nets, self.optimizers, buffer, batch_size, self.lrs, self.tau,
            self.lambda_er, rng)
        return diagnostics

    def metadata(self):
        """Architecture fields stored alongside the weights."""
        return {"obs_dim": self.nets.obs_dim, "action_dim": self.nets.action_dim,
                "hidden": self.nets.q1.weights[0].shape[0], "alpha": self.nets.alpha,
                "gamma": self.nets.gamma, "critic_uses_delta": self.nets.critic_uses_delta,
                "lr": self.lrs.policy, "tau": self.tau, "lambda_er": self.lambda_er}

    def save(self, path, metadata):
        """Write a checkpoint, merging architecture fields into ``metadata``."""
        meta = self.metadata()
        meta.update(metadata)
        return save_checkpoint(path, self.nets.networks(), self.optimizers, meta)

    @classmethod
    def load(cls, path):
        """Rebuild an agent from a checkpoint.

        :return: ``(agent, metadata)``.
        """
        networks, optimizers, metadata = load_checkpoint(path)
        missing = [n for n in NETWORK_NAMES if n not in networks]
        if missing:
            raise ConfigurationError("Checkpoint {} lacks networks {}".format(path, missing))
        try:
            nets = build_from_networks(networks, metadata)
        except KeyError as exc:
            raise ConfigurationError("Checkpoint {} metadata lacks {}".format(path, exc)) \
                from exc
        agent = cls(nets, optimizers or None, metadata.get("lr", 3e-4),
                    metadata.get("tau", 0.005), metadata.get("lambda_er", 10.0))
        _logger.info("Checkpoint loaded", path=path, epoch=metadata.get("epoch"))
        return agent, metadata


def build_from_networks(networks, metadata):
    """AgentNets from decoded checkpoint networks and metadata."""
    return AgentNets(networks["policy"], networks["q1"], networks["q2"],
                     networks["q1_target"], networks["q2_target"], networks["risk"],
                     networks["risk_target"], int(metadata["obs_dim"]),
                     int(metadata["action_dim"]), float(metadata["alpha"]),
                     float(metadata["gamma"]), bool(metadata["critic_uses_delta"]))
