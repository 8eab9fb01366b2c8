"""Tests for the tanh-squashed Gaussian head."""

import numpy as np
import pytest

from src.config import LOG_STD_MAX, LOG_STD_MIN
from src.nn.gaussian import (GaussianHead, sample_squashed_gaussian, split_head,
                             squashed_gaussian_backward, squashed_gaussian_log_prob)
from src.nn.gradcheck import numerical_gradient, relative_error


def test_log_std_is_clamped():
    """log_std never leaves its window."""
    head = GaussianHead(np.zeros(3), np.array([-100.0, 0.0, 50.0]))
    assert np.array_equal(head.log_std, [LOG_STD_MIN, 0.0, LOG_STD_MAX])


def test_split_head_mask():
    """The mask is open only strictly inside the clamp window."""
    head, mask = split_head(np.array([0.1, 0.2, -30.0, 0.5]))
    assert np.array_equal(head.mean, [0.1, 0.2])
    assert np.array_equal(head.log_std, [LOG_STD_MIN, 0.5])
    assert np.array_equal(mask, [0.0, 1.0])


def test_zero_mean_zero_noise():
    """tanh(0) = 0 and the squash correction vanishes."""
    head = GaussianHead(np.zeros(2), np.full(2, LOG_STD_MIN))
    action, log_prob = sample_squashed_gaussian(head, np.zeros(2))
    assert np.array_equal(action, [0.0, 0.0])
    expected = 2 * (-LOG_STD_MIN - 0.5 * np.log(2 * np.pi)) - 2 * np.log(1.0 + 1e-6)
    assert log_prob == pytest.approx(expected, rel=1e-12)


def test_sampling_is_deterministic_given_noise(rng):
    """Same head and noise, same action and log-probability."""
    head = GaussianHead(rng.standard_normal(2), rng.uniform(-2, 1, 2))
    noise = rng.standard_normal(2)
    first = sample_squashed_gaussian(head, noise)
    second = sample_squashed_gaussian(head, noise)
    assert np.array_equal(first[0], second[0]) and first[1] == second[1]


def test_actions_strictly_inside_box(rng):
    """Actions lie in the open box even for wide distributions."""
    head = GaussianHead(rng.uniform(-3, 3, (1000, 2)), np.full((1000, 2), 1.0))
    action, log_prob = sample_squashed_gaussian(head, rng.standard_normal((1000, 2)))
    assert np.all(np.abs(action) < 1.0)
    assert log_prob.shape == (1000,)


@pytest.mark.parametrize("seed", range(10))
def test_density_integrates_to_one(seed):
    """The 1-D density integrates to one over a 10^4-point grid."""
    rng = np.random.Generator(np.random.Philox(seed))
    mean, log_std = rng.uniform(-1.0, 1.0), rng.uniform(-1.5, -0.5)
    grid = np.linspace(-1.0, 1.0, 10002)[1:-1]
    head = GaussianHead(np.full((grid.size, 1), mean), np.full((grid.size, 1), log_std))
    density = np.exp(squashed_gaussian_log_prob(head, grid[:, None]))
    assert np.sum(density) * (grid[1] - grid[0]) == pytest.approx(1.0, abs=1e-3)


def test_log_prob_inverts_sampling(rng):
    """Evaluating the density at a sampled action returns the sampling log-probability."""
    head = GaussianHead(rng.uniform(-0.5, 0.5, 2), rng.uniform(-1.0, 0.0, 2))
    action, log_prob = sample_squashed_gaussian(head, rng.standard_normal(2) * 0.5)
    assert squashed_gaussian_log_prob(head, action) == pytest.approx(log_prob, rel=1e-8)


def test_backward_matches_finite_differences(rng):
    """Gradients through the reparameterization match central differences."""
    mean, log_std = rng.uniform(-0.5, 0.5, 2), rng.uniform(-1.0, 0.5, 2)
    noise = rng.standard_normal(2)
    weights = rng.standard_normal(2)
    coefficient = 0.7

    def objective(vector):
        head = GaussianHead(vector[:2], vector[2:])
        action, log_prob = sample_squashed_gaussian(head, noise)
        return float(np.dot(weights, action) + coefficient * log_prob)

    head = GaussianHead(mean, log_std)
    action, _ = sample_squashed_gaussian(head, noise)
    grad_mean, grad_log_std = squashed_gaussian_backward(head, noise, action, weights,
                                                         coefficient)
    numeric = numerical_gradient(objective, np.concatenate([mean, log_std]))
    assert relative_error(np.concatenate([grad_mean, grad_log_std]), numeric) <= 1e-6
