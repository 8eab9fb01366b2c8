"""Three-layer perceptrons with a hand-coded reverse pass.

Every network in the agent is a fixed ``relu -> relu -> (linear | sigmoid)`` chain, so the
reverse pass is written out directly instead of going through a general autodiff graph.
All arrays are float64.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from src.exceptions import ConfigurationError

OUTPUT_ACTIVATIONS = ("linear", "sigmoid")


@dataclass
class NetParams:
    """Weights and biases of an MLP, ``weights[i]`` has shape (out_i, in_i)."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    output_activation: str = "linear"

    def __post_init__(self):
        """Check activation and the layer chain."""
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ConfigurationError(
                "Unknown output activation {}".format(self.output_activation))
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ConfigurationError("Weights and biases must be non-empty and paired")
        for i, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            if weight.ndim != 2 or bias.shape != (weight.shape[0],):
                raise ConfigurationError("Layer {} has inconsistent shapes".format(i))
            if i and weight.shape[1] != self.weights[i - 1].shape[0]:
                raise ConfigurationError(
                    "Layer {} expects {} inputs but layer {} emits {}".format(
                        i, weight.shape[1], i - 1, self.weights[i - 1].shape[0]))

    @property
    def input_dim(self):
        """Size of the input vector."""
        return self.weights[0].shape[1]

    @property
    def output_dim(self):
        """Size of the output vector."""
        return self.weights[-1].shape[0]

    @property
    def shapes(self):
        """List of (out, in) weight shapes."""
        return [tuple(w.shape) for w in self.weights]

    def arrays(self):
        """Return all parameter arrays, weights and biases interleaved per layer."""
        out = []
        for weight, bias in zip(self.weights, self.biases):
            out.extend((weight, bias))
        return out

    def copy(self):
        """Deep copy."""
        return NetParams([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                         self.output_activation)

    def is_finite(self):
        """Whether every entry is finite."""
        return all(np.all(np.isfinite(a)) for a in self.arrays())


@dataclass
class ForwardCache:
    """Intermediate values kept for the reverse pass."""

    inputs: np.ndarray
    activations: List[np.ndarray] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)
    output: np.ndarray = None
    squeeze: bool = False


def init_mlp(sizes, rng, output_activation="linear"):
    """Build an MLP with uniform fan-in initialization in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``.

    :param sizes: Layer widths including input and output, e.g. ``[4, 256, 256, 1]``.
    :param rng: A ``numpy.random.Generator``.
    """
    if len(sizes) < 2 or any(int(s) < 1 for s in sizes):
        raise ConfigurationError("Invalid layer sizes {}".format(sizes))
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return NetParams(weights, biases, output_activation)


def _sigmoid(x):
    # Split by sign so exp never overflows.
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return out


def mlp_forward_cached(params, inputs):
    """Run the forward pass and keep what the reverse pass needs.

    :param inputs: A vector of length ``input_dim`` or a (batch, input_dim) matrix.
    """
    x = np.asarray(inputs, dtype=np.float64)
    squeeze = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != params.input_dim:
        raise ConfigurationError("Network expects {} inputs, got {}".format(
            params.input_dim, x.shape[1]))
    cache = ForwardCache(inputs=x, squeeze=squeeze)
    hidden = x
    last = len(params.weights) - 1
    for i, (weight, bias) in enumerate(zip(params.weights, params.biases)):
        cache.activations.append(hidden)
        pre = hidden @ weight.T + bias
        cache.pre_activations.append(pre)
        if i < last:
            hidden = np.maximum(pre, 0.0)
        elif params.output_activation == "sigmoid":
            hidden = _sigmoid(pre)
        else:
            hidden = pre
    cache.output = hidden
    return (hidden[0] if squeeze else hidden), cache


def mlp_forward(params, inputs):
    """Evaluate the network on a vector or a batch of row vectors."""
    output, _ = mlp_forward_cached(params, inputs)
    return output


def mlp_backward(params, inputs, upstream_grad, cache=None):
    """Gradients of ``<upstream_grad, output>`` w.r.t. all parameters and the input.

    For a batch the parameter gradients are summed over rows and the input gradient is
    returned per row.

    :return: ``(NetParams of gradients, input gradient)``.
    """
    if cache is None:
        _, cache = mlp_forward_cached(params, inputs)
    grad = np.atleast_2d(np.asarray(upstream_grad, dtype=np.float64))
    if grad.shape != cache.output.shape:
        raise ConfigurationError("Upstream gradient shape {} does not match output {}".format(
            grad.shape, cache.output.shape))
    if params.output_activation == "sigmoid":
        grad = grad * cache.output * (1.0 - cache.output)
    weight_grads = [None] * len(params.weights)
    bias_grads = [None] * len(params.weights)
    for i in range(len(params.weights) - 1, -1, -1):
        weight_grads[i] = grad.T @ cache.activations[i]
        bias_grads[i] = grad.sum(axis=0)
        grad = grad @ params.weights[i]
        if i > 0:
            grad = grad * (cache.pre_activations[i - 1] > 0.0)
    input_grad = grad[0] if cache.squeeze else grad
    return NetParams(weight_grads, bias_grads, params.output_activation), input_grad


def polyak_update(target, source, tau):
    """Return ``(1 - tau) * target + tau * source`` elementwise."""
    if not 0.0 <= tau <= 1.0:
        raise ConfigurationError("tau must lie in [0, 1], got {}".format(tau))
    if target.shapes != source.shapes:
        raise ConfigurationError("Target and source networks differ in shape")
    return NetParams(
        [(1.0 - tau) * t + tau * s for t, s in zip(target.weights, source.weights)],
        [(1.0 - tau) * t + tau * s for t, s in zip(target.biases, source.biases)],
        target.output_activation)


def flatten(params):
    """Concatenate all parameters into one vector (layer order, weights row-major)."""
    return np.concatenate([a.ravel() for a in params.arrays()])


def unflatten(vector, like):
    """Inverse of :func:`flatten` using the shapes of ``like``."""
    vector = np.asarray(vector, dtype=np.float64)
    weights, biases, offset = [], [], 0
    for weight, bias in zip(like.weights, like.biases):
        weights.append(vector[offset:offset + weight.size].reshape(weight.shape))
        offset += weight.size
        biases.append(vector[offset:offset + bias.size].copy())
        offset += bias.size
    if offset != vector.size:
        raise ConfigurationError("Vector of length {} does not fit the network".format(
            vector.size))
    return NetParams(weights, biases, like.output_activation)
