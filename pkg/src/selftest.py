"""Oracle-backed property suites runnable from the command line.

Every suite draws from its own seeded stream and raises :class:`SuiteFailure` naming the first
case that disagrees with its oracle.
"""

import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional

import daiquiri
import numpy as np

from src.agent.losses import policy_loss, q_loss, risk_critic_loss
from src.agent.nets import build_agent_nets
from src.env.maze import MazeSpec, Rect
from src.exceptions import ConfigurationError
from src.nn.adam import AdamState, adam_step
from src.nn.gaussian import GaussianHead, squashed_gaussian_log_prob
from src.nn.gradcheck import FD_TOLERANCE, network_gradient_error, relative_error
from src.nn.gradcheck import numerical_gradient
from src.nn.mlp import NetParams, init_mlp, mlp_backward, mlp_forward
from src.risk import estimators
from src.training.seeding import named_stream

_logger = daiquiri.getLogger(__name__)

GROUP_RISK = "risk"
GROUP_NN = "nn"
GROUP_AGENT = "agent"


class SuiteFailure(AssertionError):
    """A property suite found a counterexample."""

    def __init__(self, suite, case):
        """Record the suite and the failing case description."""
        super().__init__("{}: {}".format(suite, case))
        self.suite = suite
        self.case = case


@dataclass
class SuiteResult:
    """Outcome of one suite."""

    name: str
    group: str
    passed: bool
    cases: int = 0
    failure: Optional[str] = None
    seconds: float = 0.0

    def summary(self):
        """One line for the console."""
        status = "ok" if self.passed else "FAILED"
        line = "[{}] {:<14} {:>6} cases {:6.2f}s  {}".format(
            self.group, self.name, self.cases, self.seconds, status)
        return line if self.passed else "{}\n    first failing case: {}".format(
            line, self.failure)


def _check(condition, suite, case):
    if not condition:
        raise SuiteFailure(suite, case)


def suite_recursion(rng):
    """Exact recursion against brute-force enumeration and the survival product."""
    _check(abs(estimators.execution_risk_exact([0.1, 0.2, 0.3]) - 0.496) < 1e-12,
           "recursion", "[0.1, 0.2, 0.3] should give 0.496")
    for i in range(1000):
        seq = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 11)))
        exact = estimators.execution_risk_exact(seq)
        enumerated = estimators.execution_risk_enumerated(seq)
        survival = 1.0 - np.prod(1.0 - seq)
        _check(abs(exact - enumerated) <= 1e-12 and abs(exact - survival) <= 1e-12,
               "recursion", "sequence {} {}: exact {} enumerated {} survival {}".format(
                   i, seq.tolist(), exact, enumerated, survival))
    return 1001


def suite_conservatism(rng):
    """Union bound never below the exact risk, equal iff at most one entry is nonzero."""
    for i in range(10000):
        size = int(rng.integers(1, 11))
        seq = np.where(rng.uniform(size=size) < 0.3, rng.uniform(0.0, 1.0, size=size), 0.0)
        exact = estimators.execution_risk_exact(seq)
        approx = estimators.execution_risk_sum_approx(seq)
        _check(approx >= exact - 1e-12, "conservatism",
               "sequence {} {}: sum {} < exact {}".format(i, seq.tolist(), approx, exact))
        equal = abs(approx - exact) <= 1e-12
        _check(equal == (np.count_nonzero(seq) <= 1), "conservatism",
               "sequence {} {}: equality {} with {} nonzero entries".format(
                   i, seq.tolist(), equal, np.count_nonzero(seq)))
    return 10000


def suite_mc_analytic(rng):
    """Monte Carlo immediate risk against the analytic rectangle mass."""
    spec = MazeSpec(name="mc_oracle", obstacles=(Rect(4.0, 6.0, 4.0, 6.0),), goal=(9.0, 9.0))
    exact = estimators.rectangle_probability((5.0, 5.0), 1.0, spec.obstacles[0])
    within = 0
    for _ in range(100):
        estimate = estimators.immediate_risk_mc(spec, (5.0, 5.0), 1.0, 10000, rng)
        within += abs(estimate - exact) <= 0.015
    _check(within >= 99, "mc_analytic",
           "only {}/100 estimates within 0.015 of {:.4f}".format(within, exact))
    return 100


def suite_adam(rng):
    """Adam closed forms: zero gradient, first step and the constant-gradient limit."""
    params = NetParams([rng.standard_normal((1, 1))], [rng.standard_normal(1)])
    zeros = NetParams([np.zeros((1, 1))], [np.zeros(1)])
    state = AdamState.zeros_like(params)
    moved, after = adam_step(params, zeros, state, 3e-4)
    _check(np.array_equal(moved.weights[0], params.weights[0]) and after.t == 1, "adam",
           "zero gradient changed the parameters")
    for _ in range(20):
        g = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 5.0)
        grads = NetParams([np.array([[g]])], [np.array([g])])
        moved, _ = adam_step(params, grads, state, 3e-4)
        step = moved.weights[0][0, 0] - params.weights[0][0, 0]
        _check(abs(step + 3e-4 * np.sign(g)) <= 3e-4 * 1e-6, "adam",
               "first step {} for gradient {}".format(step, g))
    grads = NetParams([np.array([[0.7]])], [np.array([0.7])])
    current, state = params, AdamState.zeros_like(params)
    for _ in range(5000):
        previous = current.weights[0][0, 0]
        current, state = adam_step(current, grads, state, 1e-3)
    step = previous - current.weights[0][0, 0]
    _check(abs(step - 1e-3) <= 1e-6, "adam", "constant-gradient step {} != lr".format(step))
    return 22


def suite_squash_density(rng):
    """The squashed Gaussian density integrates to one over (-1, 1)."""
    grid = np.linspace(-1.0, 1.0, 10002)[1:-1]
    width = grid[1] - grid[0]
    for i in range(10):
        head = GaussianHead(np.array([rng.uniform(-1.0, 1.0)]),
                            np.array([rng.uniform(-1.5, -0.5)]))
        density = np.exp(squashed_gaussian_log_prob(
            GaussianHead(np.full((grid.size, 1), head.mean[0]),
                         np.full((grid.size, 1), head.log_std[0])), grid[:, None]))
        mass = float(np.sum(density) * width)
        _check(abs(mass - 1.0) <= 1e-3, "squash_density",
               "case {} mean {} log_std {}: mass {}".format(i, head.mean[0], head.log_std[0],
                                                            mass))
    return 10


def suite_mlp_gradients(rng):
    """Backpropagation through small networks against finite differences."""
    cases = 0
    for activation in ("linear", "sigmoid"):
        for i in range(10):
            params = init_mlp([3, 8, 8, 2], rng, activation)
            inputs = rng.standard_normal((4, 3))
            upstream = rng.standard_normal((4, 2))
            grads, input_grad = mlp_backward(params, inputs, upstream)

            def objective(p):
                return float(np.sum(upstream * mlp_forward(p, inputs)))

            error = network_gradient_error(objective, params, grads)
            numeric_input = numerical_gradient(
                lambda x: float(np.sum(upstream * mlp_forward(params, x.reshape(4, 3)))),
                inputs.ravel())
            error = max(error, relative_error(input_grad, numeric_input))
            _check(error <= FD_TOLERANCE, "mlp_gradients",
                   "{} net {}: relative error {:.2e}".format(activation, i, error))
            cases += 1
    return cases


def synthetic_batch(rng, obs_dim, action_dim, size=4, delta=None):
    """Random transitions shaped like a replay buffer batch."""
    deltas = rng.uniform(0.0, 1.0, size) if delta is None else np.full(size, float(delta))
    return {"s": rng.uniform(-1.0, 1.0, (size, obs_dim)),
            "a": rng.uniform(-0.9, 0.9, (size, action_dim)),
            "reward": rng.standard_normal(size), "r_b": rng.uniform(0.0, 1.0, size),
            "delta": deltas, "s_next": rng.uniform(-1.0, 1.0, (size, obs_dim)),
            "done": (rng.uniform(size=size) < 0.25).astype(np.float64)}


def loss_gradient_errors(seed, lambda_er=10.0, delta=None):
    """Relative finite-difference errors of the three losses on width-8 networks.

    :return: Mapping of loss name to relative error.
    """
    rng = named_stream(seed, "loss_gradients")
    nets = build_agent_nets(2, 2, 8, rng)
    batch = synthetic_batch(rng, 2, 2, delta=delta)
    noise = rng.standard_normal((4, 2))
    errors = {}
    q = q_loss(nets, batch, noise)
    for name in ("q1", "q2"):
        errors[name] = network_gradient_error(
            lambda p, name=name: q_loss(nets.with_networks(**{name: p}), batch, noise).loss,
            getattr(nets, name), q.grads[name])
    risk = risk_critic_loss(nets, batch, noise)
    errors["risk"] = network_gradient_error(
        lambda p: risk_critic_loss(nets.with_networks(risk=p), batch, noise).loss,
        nets.risk, risk.grads["risk"])
    pi = policy_loss(nets, batch, lambda_er, noise)
    errors["policy"] = network_gradient_error(
        lambda p: policy_loss(nets.with_networks(policy=p), batch, lambda_er, noise).loss,
        nets.policy, pi.grads["policy"])
    return errors


def suite_loss_gradients(rng):
    """Critic, risk-critic and actor gradients against finite differences.

    Covers the penalty off, strictly active (delta 0) and strictly inactive (delta 1).
    """
    cases = 0
    settings = [(0.0, None), (10.0, 0.0), (10.0, 1.0)]
    for lambda_er, delta in settings:
        for _ in range(20):
            seed = int(rng.integers(0, 2 ** 31))
            errors = loss_gradient_errors(seed, lambda_er, delta)
            worst = max(errors, key=errors.get)
            _check(errors[worst] <= FD_TOLERANCE, "loss_gradients",
                   "seed {} lambda_er {} delta {}: {} relative error {:.2e}".format(
                       seed, lambda_er, delta, worst, errors[worst]))
            cases += 1
    return cases


SUITES = OrderedDict([
    ("recursion", (GROUP_RISK, suite_recursion)),
    ("conservatism", (GROUP_RISK, suite_conservatism)),
    ("mc_analytic", (GROUP_RISK, suite_mc_analytic)),
    ("adam", (GROUP_NN, suite_adam)),
    ("squash_density", (GROUP_NN, suite_squash_density)),
    ("mlp_gradients", (GROUP_NN, suite_mlp_gradients)),
    ("loss_gradients", (GROUP_AGENT, suite_loss_gradients)),
])
GROUPS = (GROUP_RISK, GROUP_NN, GROUP_AGENT)


def select_suites(selection=None):
    """Expand group and suite names into suite names, keeping registry order."""
    if not selection:
        return list(SUITES)
    wanted = set()
    for name in selection:
        if name in GROUPS:
            wanted.update(s for s, (group, _) in SUITES.items() if group == name)
        elif name in SUITES:
            wanted.add(name)
        else:
            raise ConfigurationError("Unknown self-test suite '{}', choose from {}".format(
                name, list(GROUPS) + list(SUITES)))
    return [s for s in SUITES if s in wanted]


def run_suites(selection=None, seed=0):
    """Run the selected suites, never raising on a failed property."""
    results = []
    for name in select_suites(selection):
        group, suite = SUITES[name]
        started = time.perf_counter()
        try:
            cases = suite(named_stream(seed, "selftest", list(SUITES).index(name)))
            result = SuiteResult(name, group, True, cases)
        except SuiteFailure as failure:
            result = SuiteResult(name, group, False, failure=failure.case)
        result.seconds = time.perf_counter() - started
        _logger.debug("Suite finished", suite=name, passed=result.passed)
        results.append(result)
    return results


def first_failure(results):
    """First failing result, or None."""
    return next((r for r in results if not r.passed), None)
