"""Deterministic-policy evaluation across risk bounds."""

import time
from dataclasses import dataclass, field, fields
from typing import List, Optional

import daiquiri
import numpy as np
import pandas as pd

from src.agent.sac import DETERMINISTIC, RiskConditionedSAC
from src.config import RISK_MC_SAMPLES
from src.env.dynamics import observation_dim, observe
from src.env.episode import DONE_GOAL, path_length, reset, rollout
from src.env.maze import clearance
from src.exceptions import ConfigurationError, RiskDomainError
from src.risk.estimators import (MONTE_CARLO, ExecutionRisk, execution_risk_exact,
                                 immediate_risk_mc, policy_execution_risk_mc)

_logger = daiquiri.getLogger(__name__)


@dataclass
class EvalOptions:
    """Knobs of an evaluation run, overridable from the command line."""

    sigma: Optional[float] = None
    risk_rollouts: int = 500
    risk_samples: int = RISK_MC_SAMPLES
    n_workers: int = 1

    @classmethod
    def from_dict(cls, content):
        """Build options from a mapping, rejecting unknown keys."""
        unknown = set(content) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigurationError("Unknown evaluation option keys: {}".format(
                sorted(unknown)))
        try:
            options = cls(**content)
            too_small = min(options.risk_rollouts, options.risk_samples, options.n_workers) < 1
        except TypeError as exc:
            raise ConfigurationError("Malformed evaluation options: {}".format(exc)) from exc
        if too_small:
            raise ConfigurationError("risk_rollouts, risk_samples and n_workers must be >= 1")
        return options


EVAL_COLUMNS = ["delta", "distance_m", "steps", "exec_risk", "exec_risk_std", "goal_rate",
                "min_clearance_m", "time_s"]


@dataclass
class EpisodeTrace:
    """One evaluation rollout with its per-step immediate risks and summary metrics."""

    delta: float
    states: List[np.ndarray] = field(default_factory=list)
    actions: List[np.ndarray] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    r_b: List[float] = field(default_factory=list)
    done_reason: Optional[str] = None
    steps: int = 0
    distance: float = 0.0
    exec_risk: float = 0.0
    min_clearance: float = float("inf")
    time_s: float = 0.0

    @property
    def reached_goal(self):
        """Whether the episode ended at the goal."""
        return self.done_reason == DONE_GOAL


def bind_policy(agent, spec):
    """Deterministic policy ``(state, delta) -> squashed action`` for a maze."""
    def act(state, delta):
        return agent.select_action(observe(spec, state), delta, DETERMINISTIC)
    return act


def run_episode(agent, spec, delta, rng, sigma, risk_samples=RISK_MC_SAMPLES,
                record_time=False):
    """Roll out the deterministic policy once and label every visited state with r_b."""
    act = bind_policy(agent, spec)
    start = reset(spec, rng=rng)
    started = time.perf_counter()
    result = rollout(spec, lambda s: act(s, delta), start)
    elapsed = time.perf_counter() - started if record_time else 0.0
    r_b = [immediate_risk_mc(spec, s, sigma, risk_samples, rng) for s in result.states]
    return EpisodeTrace(delta=float(delta), states=result.states, actions=result.actions,
                        rewards=result.rewards, r_b=r_b, done_reason=result.done_reason,
                        steps=len(result.actions), distance=path_length(result.states),
                        exec_risk=execution_risk_exact(r_b),
                        min_clearance=float(np.min(clearance(spec, np.asarray(
                            result.states)))),
                        time_s=elapsed)


def check_compatible(metadata, spec):
    """Reject a checkpoint trained on other dynamics or observation size."""
    dynamics = metadata.get("dynamics")
    if dynamics is not None and dynamics != spec.dynamics:
        raise ConfigurationError("Checkpoint was trained with {} dynamics, maze {} uses {}"
                                 .format(dynamics, spec.name, spec.dynamics))
    if int(metadata.get("obs_dim", observation_dim(spec))) != observation_dim(spec):
        raise ConfigurationError("Checkpoint observation size {} does not fit maze {}".format(
            metadata.get("obs_dim"), spec.name))


def evaluate(checkpoint, spec, deltas, episodes_per_delta, rng, sigma=None,
             risk_rollouts=500, risk_samples=RISK_MC_SAMPLES, n_workers=1, record_time=False):
    """Evaluate a trained policy for each risk bound.

    :param checkpoint: A checkpoint path or a ``RiskConditionedSAC`` instance.
    :return: ``(table, traces)``, one table row per delta in input order.
    """
    if isinstance(checkpoint, RiskConditionedSAC):
        agent = checkpoint
    else:
        agent, metadata = RiskConditionedSAC.load(checkpoint)
        check_compatible(metadata, spec)
    sigma = spec.sigma if sigma is None else sigma
    bad = [d for d in deltas if not 0.0 <= float(d) <= 1.0]
    if bad:
        raise RiskDomainError("Risk bounds {} outside [0, 1]".format(bad))
    rows, traces = [], []
    for delta in deltas:
        episode_traces = [run_episode(agent, spec, delta, rng, sigma, risk_samples, record_time)
                          for _ in range(episodes_per_delta)]
        exec_risk = ExecutionRisk(policy_execution_risk_mc(
            spec, bind_policy(agent, spec), delta, risk_rollouts, sigma, rng,
            n_samples=risk_samples, n_workers=n_workers), MONTE_CARLO)
        rows.append({
            "delta": float(delta),
            "distance_m": _mean([t.distance for t in episode_traces]),
            "steps": _mean([t.steps for t in episode_traces]),
            "exec_risk": exec_risk.er,
            "exec_risk_std": float(np.std([t.exec_risk for t in episode_traces]))
            if episode_traces else float("nan"),
            "goal_rate": _mean([float(t.reached_goal) for t in episode_traces]),
            "min_clearance_m": _mean([t.min_clearance for t in episode_traces]),
            "time_s": _mean([t.time_s for t in episode_traces]),
        })
        traces.extend(episode_traces)
        _logger.info("Evaluated risk bound", delta=float(delta), **{
            k: rows[-1][k] for k in ("distance_m", "steps", "exec_risk", "goal_rate")})
    return pd.DataFrame(rows, columns=EVAL_COLUMNS), traces


def _mean(values):
    return float(np.mean(values)) if len(values) else float("nan")


def summarize_seeds(tables):
    """Mean and standard deviation per delta across evaluation tables of several seeds."""
    if not tables:
        return pd.DataFrame()
    merged = pd.concat([t.assign(seed_index=i) for i, t in enumerate(tables)],
                       ignore_index=True)
    metrics = [c for c in EVAL_COLUMNS if c != "delta"]
    summary = merged.groupby("delta")[metrics].agg(["mean", "std"])
    summary.columns = ["{}_{}".format(metric, stat) for metric, stat in summary.columns]
    return summary.reset_index()
