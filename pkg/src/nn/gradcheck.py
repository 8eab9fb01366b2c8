"""Central finite-difference gradient checks for network parameters."""

import numpy as np

from src.nn.mlp import flatten, unflatten

FD_STEP = 1e-5
FD_TOLERANCE = 1e-4


def numerical_gradient(fn, vector, h=FD_STEP):
    """Central differences ``(f(x + h e_i) - f(x - h e_i)) / 2h`` of a scalar function."""
    vector = np.asarray(vector, dtype=np.float64)
    grad = np.zeros_like(vector)
    for i in range(vector.size):
        up = vector.copy()
        down = vector.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (fn(up) - fn(down)) / (2.0 * h)
    return grad


def relative_error(analytic, numeric):
    """``|a - n| / max(|a|, |n|)`` in the Euclidean norm, 0 when both vanish."""
    analytic = np.ravel(analytic)
    numeric = np.ravel(numeric)
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if scale < 1e-12:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def network_gradient_error(loss_fn, params, analytic_grads, h=FD_STEP):
    """Relative error between analytic gradients and finite differences of ``loss_fn(params)``.

    :param loss_fn: Scalar function of a NetParams.
    :param analytic_grads: NetParams holding the analytic gradient.
    """
    numeric = numerical_gradient(lambda v: loss_fn(unflatten(v, params)), flatten(params), h)
    return relative_error(flatten(analytic_grads), numeric)
