"""Tests for JSON checkpoints."""

import json

import numpy as np
import pytest

from src.config import CHECKPOINT_FORMAT_VERSION
from src.exceptions import ConfigurationError
from src.nn.adam import AdamState, adam_step
from src.nn.checkpoint import load_checkpoint, save_checkpoint
from src.nn.mlp import flatten, init_mlp


def test_save_and_load_are_bit_exact(tmpdir, rng):
    """Weights, optimizer moments and metadata come back unchanged."""
    policy = init_mlp([3, 8, 8, 4], rng)
    risk = init_mlp([5, 8, 8, 1], rng, "sigmoid")
    state = AdamState.zeros_like(policy)
    _, state = adam_step(policy, policy, state, 0.01)
    path = str(tmpdir.join("checkpoint.json"))
    save_checkpoint(path, {"policy": policy, "risk": risk}, {"policy": state},
                    {"seed": 7, "epoch": 3, "config_hash": "abc"})

    networks, optimizers, metadata = load_checkpoint(path)
    assert np.array_equal(flatten(networks["policy"]), flatten(policy))
    assert networks["risk"].output_activation == "sigmoid"
    assert optimizers["policy"].t == 1
    assert all(np.array_equal(a, b) for a, b in zip(optimizers["policy"].m, state.m))
    assert metadata["seed"] == 7
    assert metadata["format_version"] == CHECKPOINT_FORMAT_VERSION


def test_layout_is_flat_row_major(tmpdir, rng):
    """Layers carry their shape and a flat row-major weight list."""
    net = init_mlp([2, 3, 3, 1], rng)
    path = str(tmpdir.join("c.json"))
    save_checkpoint(path, {"q1": net}, {}, {})
    with open(path) as handle:
        document = json.load(handle)
    layer = document["networks"]["q1"]["layers"][0]
    assert layer["shape"] == [3, 2]
    assert layer["weight"] == net.weights[0].ravel().tolist()


def test_missing_file(tmpdir):
    """A missing checkpoint is a configuration error."""
    with pytest.raises(ConfigurationError):
        load_checkpoint(str(tmpdir.join("nope.json")))


def test_malformed_document(tmpdir):
    """Documents without networks are rejected."""
    path = tmpdir.join("bad.json")
    path.write('{"metadata": {}}')
    with pytest.raises(ConfigurationError):
        load_checkpoint(str(path))


def test_wrong_weight_count(tmpdir, rng):
    """A layer whose weights do not fill its shape is rejected."""
    net = init_mlp([2, 3, 3, 1], rng)
    path = str(tmpdir.join("c.json"))
    save_checkpoint(path, {"q1": net}, {}, {})
    with open(path) as handle:
        document = json.load(handle)
    document["networks"]["q1"]["layers"][0]["weight"].pop()
    with open(path, "w") as handle:
        json.dump(document, handle)
    with pytest.raises(ConfigurationError):
        load_checkpoint(path)
