"""Tanh-squashed Gaussian policy head."""

from dataclasses import dataclass

import numpy as np

from src.config import LOG_STD_MAX, LOG_STD_MIN, TANH_EPS

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass
class GaussianHead:
    """Mean and clamped log standard deviation, each (action_dim,) or (batch, action_dim)."""

    mean: np.ndarray
    log_std: np.ndarray

    def __post_init__(self):
        """Clamp log_std into the allowed window."""
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.log_std = np.clip(np.asarray(self.log_std, dtype=np.float64),
                               LOG_STD_MIN, LOG_STD_MAX)


def split_head(raw_output):
    """Split the policy network output into a GaussianHead and the clamp pass-through mask.

    The first half of the output is the mean, the second half the unclamped log_std. The mask
    is 1 where the clamp is inactive, so the log_std gradient can be routed back to the net.
    """
    raw_output = np.asarray(raw_output, dtype=np.float64)
    action_dim = raw_output.shape[-1] // 2
    mean = raw_output[..., :action_dim]
    raw_log_std = raw_output[..., action_dim:]
    mask = ((raw_log_std > LOG_STD_MIN) & (raw_log_std < LOG_STD_MAX)).astype(np.float64)
    return GaussianHead(mean, raw_log_std), mask


def sample_squashed_gaussian(head, noise):
    """Reparameterized sample ``tanh(mean + exp(log_std) * noise)`` and its log density.

    :param noise: Standard normal draw with the shape of ``head.mean``.
    :return: ``(action, log_prob)``; log_prob is a scalar for a single head, a vector per row
        for a batch.
    """
    noise = np.asarray(noise, dtype=np.float64)
    pre_squash = head.mean + np.exp(head.log_std) * noise
    action = np.tanh(pre_squash)
    log_prob = np.sum(-0.5 * noise ** 2 - head.log_std - _HALF_LOG_2PI, axis=-1)
    log_prob = log_prob - np.sum(np.log(1.0 - action ** 2 + TANH_EPS), axis=-1)
    return action, log_prob


def squashed_gaussian_log_prob(head, action):
    """Log density of an action already in (-1, 1), inverting the squash."""
    action = np.asarray(action, dtype=np.float64)
    noise = (np.arctanh(action) - head.mean) / np.exp(head.log_std)
    _, log_prob = sample_squashed_gaussian(head, noise)
    return log_prob


def squashed_gaussian_backward(head, noise, action, grad_action, grad_log_prob):
    """Pull gradients of (action, log_prob) back to (mean, log_std) at fixed noise.

    :param grad_action: Upstream gradient w.r.t. the action, shape of ``action``.
    :param grad_log_prob: Upstream gradient w.r.t. log_prob, one value per row.
    :return: ``(grad_mean, grad_log_std)``, the log_std gradient before the clamp mask.
    """
    noise = np.asarray(noise, dtype=np.float64)
    grad_log_prob = np.asarray(grad_log_prob, dtype=np.float64)[..., None]
    one_minus_sq = 1.0 - action ** 2
    grad_pre = grad_action * one_minus_sq \
        + grad_log_prob * 2.0 * action * one_minus_sq / (one_minus_sq + TANH_EPS)
    grad_mean = grad_pre
    grad_log_std = grad_pre * np.exp(head.log_std) * noise - grad_log_prob
    return grad_mean, grad_log_std
