"""Immediate and execution risk estimators.

Immediate risk is the probability that the true position, Gaussian around the nominal one, lies
in an obstacle. Execution risk composes immediate risks along a trajectory; the exact form is
``er_t = r_t + (1 - r_t) * er_{t+1}`` with ``er_T = r_T``, the sum form is its union bound.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import daiquiri
import numpy as np
from scipy.stats import norm

from src.env.episode import reset, rollout
from src.env.maze import in_collision
from src.exceptions import ConfigurationError, RiskDomainError

_logger = daiquiri.getLogger(__name__)

EXACT_RECURSION = "exact_recursion"
SUM_APPROX = "sum_approx"
MONTE_CARLO = "monte_carlo"

MODE_RECURSION = "recursion"
MODE_FLAGS = "flags"


@dataclass(frozen=True)
class RiskSample:
    """Monte Carlo immediate risk at one state."""

    r_b: float
    n_samples: int
    sigma: float

    def __post_init__(self):
        """Check ranges."""
        if not 0.0 <= self.r_b <= 1.0:
            raise RiskDomainError("Immediate risk {} outside [0, 1]".format(self.r_b))
        if self.n_samples < 1:
            raise ConfigurationError("n_samples must be >= 1")


@dataclass(frozen=True)
class ExecutionRisk:
    """An execution risk value and how it was obtained; sum_approx may exceed 1."""

    er: float
    method: str

    def __post_init__(self):
        """Only the union bound may leave [0, 1]."""
        if self.method not in (EXACT_RECURSION, SUM_APPROX, MONTE_CARLO):
            raise ConfigurationError("Unknown execution risk method '{}'".format(self.method))
        if self.method != SUM_APPROX and not 0.0 <= self.er <= 1.0:
            raise RiskDomainError("Execution risk {} outside [0, 1]".format(self.er))


def collision_count(spec, position, sigma, n_samples, rng):
    """Number of ``N(position, sigma^2 I)`` draws that land in an obstacle."""
    if n_samples < 1:
        raise ConfigurationError("n_samples must be >= 1, got {}".format(n_samples))
    if sigma < 0:
        raise ConfigurationError("sigma must be >= 0, got {}".format(sigma))
    position = np.asarray(position, dtype=np.float64)[:2]
    if sigma == 0 or not spec.obstacles:
        return n_samples if in_collision(spec, position) else 0
    points = position + sigma * rng.standard_normal((n_samples, 2))
    return int(np.count_nonzero(in_collision(spec, points)))


def immediate_risk_sample(spec, state, sigma, n_samples, rng):
    """Monte Carlo immediate risk packaged with its sample size."""
    count = collision_count(spec, state, sigma, n_samples, rng)
    return RiskSample(count / n_samples, n_samples, sigma)


def immediate_risk_mc(spec, state, sigma, n_samples, rng):
    """Fraction of Gaussian-perturbed positions in collision; sigma 0 gives the indicator."""
    return immediate_risk_sample(spec, state, sigma, n_samples, rng).r_b


def rectangle_probability(position, sigma, rect):
    """Gaussian mass of an axis-aligned rectangle, product of 1-D normal CDF differences."""
    if sigma == 0:
        return float(rect.contains(position))
    x, y = position[0], position[1]
    px = norm.cdf((rect.x_max - x) / sigma) - norm.cdf((rect.x_min - x) / sigma)
    py = norm.cdf((rect.y_max - y) / sigma) - norm.cdf((rect.y_min - y) / sigma)
    return float(px * py)


def _check_probabilities(r_b_seq):
    seq = np.asarray(r_b_seq, dtype=np.float64).ravel()
    if np.any(~np.isfinite(seq)) or np.any(seq < 0.0) or np.any(seq > 1.0):
        raise RiskDomainError("Immediate risks must lie in [0, 1], got {}".format(seq))
    return seq


def execution_risk_exact(r_b_seq):
    """Backward recursion over a trajectory's immediate risks, an empty trajectory is safe."""
    seq = _check_probabilities(r_b_seq)
    er = 0.0
    for r_b in seq[::-1]:
        er = r_b + (1.0 - r_b) * er
    return float(er)


def execution_risk_sum_approx(r_b_seq):
    """Sum of immediate risks, reported unclamped."""
    return float(np.sum(_check_probabilities(r_b_seq)))


def execution_risk_enumerated(r_b_seq):
    """Execution risk by enumerating every safe/unsafe outcome path (small T only)."""
    seq = _check_probabilities(r_b_seq)
    unsafe = 0.0
    for outcome in itertools.product((False, True), repeat=len(seq)):
        flags = np.asarray(outcome, dtype=bool)
        probability = np.prod(np.where(flags, seq, 1.0 - seq))
        if flags.any():
            unsafe += probability
    return float(unsafe)


def execution_risk(r_b_seq, method=EXACT_RECURSION):
    """Execution risk of a trajectory by the named deterministic method."""
    if method == EXACT_RECURSION:
        return ExecutionRisk(execution_risk_exact(r_b_seq), method)
    if method == SUM_APPROX:
        return ExecutionRisk(execution_risk_sum_approx(r_b_seq), method)
    raise ConfigurationError("Unknown execution risk method '{}'".format(method))


def _rollout_risk(spec, policy_fn, delta, sigma, n_samples, mode, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    start = reset(spec, rng=rng)
    trace = rollout(spec, lambda s: policy_fn(s, delta), start, rng)
    if mode == MODE_FLAGS:
        positions = np.asarray(trace.states)[:, :2]
        perturbed = positions + sigma * rng.standard_normal(positions.shape)
        return float(np.any(in_collision(spec, perturbed)))
    r_b_seq = [immediate_risk_mc(spec, s, sigma, n_samples, rng) for s in trace.states]
    return execution_risk_exact(r_b_seq)


def policy_execution_risk_mc(spec, policy_fn, delta, n_rollouts, sigma, rng,
                             mode=MODE_RECURSION, n_samples=500, n_workers=1):
    """Monte Carlo execution risk of a deterministic policy at risk bound ``delta``.

    ``recursion`` mode averages the exact recursion over MC immediate risks of each nominal
    rollout; ``flags`` mode perturbs each visited state once and counts rollouts that collide.
    Each rollout gets its own substream so the result does not depend on ``n_workers``.

    :param policy_fn: ``policy_fn(state, delta) -> squashed action``.
    """
    if n_rollouts < 1:
        raise ConfigurationError("n_rollouts must be >= 1")
    if mode not in (MODE_RECURSION, MODE_FLAGS):
        raise ConfigurationError("Unknown execution risk mode '{}'".format(mode))
    seeds = [int(s) for s in rng.integers(0, 2 ** 63 - 1, size=n_rollouts)]

    def run(seed):
        return _rollout_risk(spec, policy_fn, delta, sigma, n_samples, mode, seed)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            risks = list(pool.map(run, seeds))
    else:
        risks = [run(seed) for seed in seeds]
    value = float(np.mean(risks))
    _logger.debug("Policy execution risk estimated", delta=delta, mode=mode,
                  n_rollouts=n_rollouts, er=value)
    return value
