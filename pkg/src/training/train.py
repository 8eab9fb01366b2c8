"""Risk-conditioned SAC training loop: collect risk-labelled transitions, update, evaluate."""

import json
import os
import time
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import daiquiri
import numpy as np
import pandas as pd

from src.agent.buffer import ReplayBuffer, Transition
from src.agent.sac import STOCHASTIC, RiskConditionedSAC
from src.config import (CHECKPOINT_FILENAME, HIDDEN_WIDTH, LOG_FILENAME,
                        MIN_ACCURATE_RISK_SAMPLES, NAN_DUMP_FILENAME, RESOLVED_CONFIG_FILENAME)
from src.env.dynamics import observation_dim, observe
from src.env.episode import env_step, reset
from src.exceptions import ConfigurationError, NumericalAbort
from src.risk.estimators import immediate_risk_mc
from src.training.evaluate import evaluate
from src.training.seeding import risk_label_stream, seed_everything
from src.utils import config_hash, write_toml

_logger = daiquiri.getLogger(__name__)

LOG_COLUMNS = ["epoch", "q_loss", "risk_loss", "policy_loss", "mean_q", "mean_risk_estimate",
               "eval_steps", "eval_distance", "eval_exec_risk", "wall_time_s"]
UPDATE_COLUMNS = ["q_loss", "risk_loss", "policy_loss", "mean_q", "mean_risk_estimate"]


@dataclass
class TrainConfig:
    """Hyperparameters of one training run; the seed determines the run completely."""

    epochs: int = 200
    env_steps_per_epoch: int = 1000
    grad_steps_per_epoch: int = 1000
    batch_size: int = 256
    lr: float = 3e-4
    gamma: float = 0.99
    lambda_er: float = 10.0
    alpha: float = 0.2
    tau: float = 0.005
    buffer_capacity: int = 100000
    delta_lo: float = 0.0
    delta_hi: float = 1.0
    risk_samples: int = 500
    sigma: Optional[float] = None
    eval_interval: int = 10
    eval_episodes: int = 1
    eval_deltas: List[float] = field(default_factory=lambda: [0.1, 0.2, 0.3])
    eval_risk_rollouts: int = 500
    hidden: int = HIDDEN_WIDTH
    warmup_steps: int = 1000
    critic_uses_delta: bool = True
    n_workers: int = 1
    record_wall_time: bool = False
    seed: int = 0

    def __post_init__(self):
        """Validate ranges."""
        positive = ("env_steps_per_epoch", "batch_size", "buffer_capacity", "risk_samples",
                    "eval_interval", "eval_episodes", "eval_risk_rollouts", "hidden",
                    "n_workers", "lr", "alpha")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigurationError("{} must be > 0, got {}".format(
                    name, getattr(self, name)))
        for name in ("epochs", "grad_steps_per_epoch", "warmup_steps", "lambda_er", "seed"):
            if getattr(self, name) < 0:
                raise ConfigurationError("{} must be >= 0, got {}".format(
                    name, getattr(self, name)))
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigurationError("gamma must lie in (0, 1], got {}".format(self.gamma))
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigurationError("tau must lie in [0, 1], got {}".format(self.tau))
        if not 0.0 <= self.delta_lo <= self.delta_hi <= 1.0:
            raise ConfigurationError("Need 0 <= delta_lo <= delta_hi <= 1, got [{}, {}]".format(
                self.delta_lo, self.delta_hi))
        if self.sigma is not None and self.sigma < 0:
            raise ConfigurationError("sigma must be >= 0, got {}".format(self.sigma))
        if any(not 0.0 <= d <= 1.0 for d in self.eval_deltas):
            raise ConfigurationError("eval_deltas must lie in [0, 1], got {}".format(
                self.eval_deltas))

    @classmethod
    def from_dict(cls, content):
        """Build a config from a mapping, rejecting unknown keys."""
        unknown = set(content) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError("Unknown training config keys: {}".format(sorted(unknown)))
        kwargs = dict(content)
        try:
            if "eval_deltas" in kwargs:
                kwargs["eval_deltas"] = [float(d) for d in kwargs["eval_deltas"]]
            return cls(**kwargs)
        except ConfigurationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigurationError("Malformed training config: {}".format(exc)) from exc

    def to_dict(self):
        """Plain mapping without unset optional values (TOML has no null)."""
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class TrainResult:
    """What a training run leaves behind."""

    agent: RiskConditionedSAC
    log: pd.DataFrame
    checkpoint_path: str
    log_path: str
    config_hash: str


def resolved_config(config, spec):
    """Both configuration blocks as written to ``resolved.toml``."""
    return {"train": config.to_dict(), "env": spec.to_dict()}


class ExperienceCollector:
    """Steps the environment across epoch boundaries and labels every state with r_b.

    Each episode draws its own risk bound from ``U[delta_lo, delta_hi]``.
    """

    def __init__(self, spec, config, streams, sigma):
        """Start the first episode."""
        self.spec = spec
        self.config = config
        self.streams = streams
        self.sigma = sigma
        self.global_step = 0
        self.episodes = 0
        self._start_episode()

    def _start_episode(self):
        self.state = reset(self.spec, rng=self.streams["env"])
        self.t = 0
        self.delta = float(self.streams["env"].uniform(self.config.delta_lo,
                                                       self.config.delta_hi))

    def label(self, state, step):
        """Immediate risk of ``state`` drawn from the substream of environment step ``step``."""
        return immediate_risk_mc(self.spec, state, self.sigma, self.config.risk_samples,
                                 risk_label_stream(self.config.seed, step))

    def collect(self, agent, buffer, n_steps):
        """Run ``n_steps`` environment steps, pushing one transition per step."""
        for _ in range(n_steps):
            obs = observe(self.spec, self.state)
            if self.global_step < self.config.warmup_steps:
                action = self.streams["policy"].uniform(-1.0, 1.0, size=self.spec.action_dim)
            else:
                action = agent.select_action(obs, self.delta, STOCHASTIC, self.streams["policy"])
            r_b = self.label(self.state, self.global_step)
            result = env_step(self.spec, self.state, action, self.t, self.streams["env"])
            buffer.push(Transition(obs, action, result.reward, r_b, self.delta,
                                   observe(self.spec, result.next_state), result.done))
            self.global_step += 1
            if result.done:
                self.episodes += 1
                self._start_episode()
            else:
                self.state = result.next_state
                self.t += 1


def write_nan_dump(path, error):
    """Write the offending batch and diagnostics of a numerical abort as JSON."""
    batch = {k: np.asarray(v).tolist() for k, v in (error.batch or {}).items()}
    diagnostics = {k: float(v) for k, v in error.diagnostics.items()}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"message": str(error), "diagnostics": diagnostics, "batch": batch}, handle)
    return path


def _gradient_phase(agent, buffer, config, rng):
    updates = []
    for _ in range(config.grad_steps_per_epoch):
        diagnostics = agent.update_step(buffer, config.batch_size, rng)
        if not diagnostics["skipped"]:
            updates.append([diagnostics[c] for c in UPDATE_COLUMNS])
    if not updates:
        return {c: float("nan") for c in UPDATE_COLUMNS}
    return dict(zip(UPDATE_COLUMNS, np.mean(np.asarray(updates), axis=0).tolist()))


def _evaluation_metrics(agent, spec, config, sigma, rng):
    table, _ = evaluate(agent, spec, config.eval_deltas, config.eval_episodes, rng,
                        sigma=sigma, risk_rollouts=config.eval_risk_rollouts,
                        risk_samples=config.risk_samples, n_workers=config.n_workers)
    if table.empty:
        return {"eval_steps": float("nan"), "eval_distance": float("nan"),
                "eval_exec_risk": float("nan")}
    return {"eval_steps": float(table["steps"].mean()),
            "eval_distance": float(table["distance_m"].mean()),
            "eval_exec_risk": float(table["exec_risk"].mean())}


def train(config, spec, out_dir):
    """Train a risk-conditioned agent on a maze and write checkpoint, log and resolved config.

    :raises NumericalAbort: After writing ``nan_dump.json`` when a loss turns non-finite.
    """
    os.makedirs(out_dir, exist_ok=True)
    if config.risk_samples < MIN_ACCURATE_RISK_SAMPLES:
        _logger.warning("Immediate risk labels use fewer samples than evaluation, expect noisy "
                        "risk estimates", risk_samples=config.risk_samples,
                        recommended=MIN_ACCURATE_RISK_SAMPLES)
    streams = seed_everything(config.seed)
    sigma = spec.sigma if config.sigma is None else config.sigma
    obs_dim = observation_dim(spec)
    agent = RiskConditionedSAC.create(obs_dim, spec.action_dim, streams["init"],
                                      hidden=config.hidden, alpha=config.alpha,
                                      gamma=config.gamma, lr=config.lr, tau=config.tau,
                                      lambda_er=config.lambda_er,
                                      critic_uses_delta=config.critic_uses_delta)
    buffer = ReplayBuffer(config.buffer_capacity, obs_dim, spec.action_dim)

    resolved = resolved_config(config, spec)
    digest = config_hash(resolved)
    write_toml(resolved, os.path.join(out_dir, RESOLVED_CONFIG_FILENAME))
    metadata = {"config_hash": digest, "seed": config.seed, "dynamics": spec.dynamics,
                "env": spec.name}
    checkpoint_path = os.path.join(out_dir, CHECKPOINT_FILENAME)
    log_path = os.path.join(out_dir, LOG_FILENAME)
    agent.save(checkpoint_path, dict(metadata, epoch=0))

    collector = ExperienceCollector(spec, config, streams, sigma)
    rows = []
    log = pd.DataFrame(rows, columns=LOG_COLUMNS)
    log.to_csv(log_path, index=False)
    _logger.info("Training started", env=spec.name, seed=config.seed, epochs=config.epochs,
                 config_hash=digest)
    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        collector.collect(agent, buffer, config.env_steps_per_epoch)
        try:
            row = _gradient_phase(agent, buffer, config, streams["buffer"])
        except NumericalAbort as exc:
            exc.dump_path = write_nan_dump(os.path.join(out_dir, NAN_DUMP_FILENAME), exc)
            _logger.error("Numerical abort", epoch=epoch, dump=exc.dump_path, error=str(exc))
            raise
        evaluating = epoch % config.eval_interval == 0 or epoch == config.epochs
        if evaluating:
            row.update(_evaluation_metrics(agent, spec, config, sigma, streams["eval"]))
        else:
            row.update(eval_steps=float("nan"), eval_distance=float("nan"),
                       eval_exec_risk=float("nan"))
        row["epoch"] = epoch
        row["wall_time_s"] = time.perf_counter() - started if config.record_wall_time else 0.0
        rows.append(row)
        log = pd.DataFrame(rows, columns=LOG_COLUMNS)
        log.to_csv(log_path, index=False)
        if evaluating:
            agent.save(checkpoint_path, dict(metadata, epoch=epoch))
        _logger.info("Epoch finished", epoch=epoch, episodes=collector.episodes,
                     buffer=len(buffer), **{k: row[k] for k in UPDATE_COLUMNS})
    return TrainResult(agent, log, checkpoint_path, log_path, digest)
