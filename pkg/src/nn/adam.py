"""Adam optimizer over NetParams."""

from dataclasses import dataclass
from typing import List

import numpy as np

from src.config import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from src.exceptions import ConfigurationError
from src.nn.mlp import NetParams


@dataclass
class AdamState:
    """First/second moment estimates, one array per parameter array of the network."""

    m: List[np.ndarray]
    v: List[np.ndarray]
    t: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS

    @classmethod
    def zeros_like(cls, params, beta1=ADAM_BETA1, beta2=ADAM_BETA2, eps=ADAM_EPS):
        """Fresh state for ``params``."""
        return cls([np.zeros_like(a) for a in params.arrays()],
                   [np.zeros_like(a) for a in params.arrays()], 0, beta1, beta2, eps)


def adam_step(params, grads, state, lr):
    """Apply one bias-corrected Adam update.

    :return: ``(new params, new state)``; the inputs are left untouched.
    """
    param_arrays = params.arrays()
    grad_arrays = grads.arrays()
    if [a.shape for a in param_arrays] != [g.shape for g in grad_arrays] \
            or len(state.m) != len(param_arrays):
        raise ConfigurationError("Adam step received mismatched shapes")
    t = state.t + 1
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t
    new_arrays, new_m, new_v = [], [], []
    for param, grad, m, v in zip(param_arrays, grad_arrays, state.m, state.v):
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * (grad * grad)
        m_hat = m / correction1
        v_hat = v / correction2
        new_arrays.append(param - lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m)
        new_v.append(v)
    new_params = NetParams(new_arrays[0::2], new_arrays[1::2], params.output_activation)
    return new_params, AdamState(new_m, new_v, t, state.beta1, state.beta2, state.eps)
