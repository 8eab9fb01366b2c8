"""JSON checkpoints of networks, optimizer states and run metadata."""

import json

import daiquiri
import numpy as np

from src.config import CHECKPOINT_FORMAT_VERSION
from src.exceptions import ConfigurationError
from src.nn.adam import AdamState
from src.nn.mlp import NetParams

_logger = daiquiri.getLogger(__name__)


def _encode_net(params):
    return {
        "output_activation": params.output_activation,
        "layers": [{"shape": list(w.shape), "weight": w.ravel().tolist(), "bias": b.tolist()}
                   for w, b in zip(params.weights, params.biases)],
    }


def _decode_net(name, content):
    weights, biases = [], []
    for i, layer in enumerate(content["layers"]):
        shape = tuple(layer["shape"])
        weight = np.asarray(layer["weight"], dtype=np.float64)
        if weight.size != shape[0] * shape[1]:
            raise ConfigurationError("Network {} layer {} has {} weights for shape {}".format(
                name, i, weight.size, shape))
        weights.append(weight.reshape(shape))
        biases.append(np.asarray(layer["bias"], dtype=np.float64))
    return NetParams(weights, biases, content["output_activation"])


def _encode_adam(state):
    return {"t": state.t, "beta1": state.beta1, "beta2": state.beta2, "eps": state.eps,
            "m": [a.ravel().tolist() for a in state.m],
            "v": [a.ravel().tolist() for a in state.v]}


def _decode_adam(content, params):
    shapes = [a.shape for a in params.arrays()]
    m = [np.asarray(a, dtype=np.float64).reshape(s) for a, s in zip(content["m"], shapes)]
    v = [np.asarray(a, dtype=np.float64).reshape(s) for a, s in zip(content["v"], shapes)]
    return AdamState(m, v, int(content["t"]), content["beta1"], content["beta2"],
                     content["eps"])


def checkpoint_document(networks, optimizers, metadata):
    """Build the checkpoint document.

    :param networks: Mapping of network name to NetParams.
    :param optimizers: Mapping of trainable network name to AdamState.
    :param metadata: Free-form metadata (config hash, epoch, seed, dims, ...).
    """
    meta = dict(metadata)
    meta.setdefault("format_version", CHECKPOINT_FORMAT_VERSION)
    return {
        "networks": {name: _encode_net(params) for name, params in networks.items()},
        "optimizers": {name: _encode_adam(state) for name, state in optimizers.items()},
        "metadata": meta,
    }


def save_checkpoint(path, networks, optimizers, metadata):
    """Write a checkpoint JSON document to ``path``."""
    document = checkpoint_document(networks, optimizers, metadata)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle)
    _logger.debug("Checkpoint written", path=path, epoch=metadata.get("epoch"))
    return path


def load_checkpoint(path):
    """Read a checkpoint back.

    :return: ``(networks, optimizers, metadata)``.
    :raises ConfigurationError: If the file is missing or malformed.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            document = json.load(handle)
    except (OSError, ValueError) as exc:
        raise ConfigurationError("Unable to load checkpoint {}: {}".format(path, exc)) from exc
    try:
        networks = {name: _decode_net(name, content)
                    for name, content in document["networks"].items()}
        optimizers = {name: _decode_adam(content, networks[name])
                      for name, content in document.get("optimizers", {}).items()}
        metadata = document["metadata"]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError("Malformed checkpoint {}: {}".format(path, exc)) from exc
    return networks, optimizers, metadata
