"""Test helper functions."""

import os

import pytest
import toml

from src.exceptions import ConfigurationError
from src.utils import (apply_overrides, config_hash, convert_string2bool_env, load_config_file,
                       parse_override, write_toml)

MAZES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                     "test_data", "mazes")


def test_convert_string2bool_env():
    """Test convert_string2bool_env()."""
    assert convert_string2bool_env("TRUE")
    assert not convert_string2bool_env("False")


@pytest.mark.parametrize("name", ["corridor.toml", "corridor.json", "corridor.yaml"])
def test_load_config_file(name):
    """All three formats parse to the same mapping."""
    content = load_config_file(os.path.join(MAZES, name))
    assert content["bounds"] == [0.0, 10.0, 0.0, 4.0]
    assert content["horizon"] == 30


def test_load_config_file_errors(tmpdir):
    """Missing, malformed, unsupported and non-mapping files are rejected."""
    with pytest.raises(ConfigurationError):
        load_config_file(str(tmpdir.join("missing.toml")))
    with pytest.raises(ConfigurationError):
        load_config_file(os.path.join(MAZES, "malformed.toml"))
    with pytest.raises(ConfigurationError):
        load_config_file(os.path.join(MAZES, "not_a_mapping.yaml"))
    ini = tmpdir.join("maze.ini")
    ini.write("[maze]")
    with pytest.raises(ConfigurationError):
        load_config_file(str(ini))
    bad_yaml = tmpdir.join("bad.yaml")
    bad_yaml.write("key: [unclosed")
    with pytest.raises(ConfigurationError):
        load_config_file(str(bad_yaml))


def test_parse_override():
    """Values are JSON literals when possible, strings otherwise."""
    assert parse_override("lambda_er=20") == ("lambda_er", 20)
    assert parse_override("eval_deltas=[0.1, 0.2]") == ("eval_deltas", [0.1, 0.2])
    assert parse_override("env.name=Foo") == ("env.name", "Foo")
    with pytest.raises(ConfigurationError):
        parse_override("lambda_er")
    with pytest.raises(ConfigurationError):
        parse_override("=3")


def test_apply_overrides():
    """env. keys go to the maze block and inputs stay untouched."""
    train = {"epochs": 3}
    train_out, env_out = apply_overrides(train, {}, ["epochs=5", "env.sigma=0.5"])
    assert train_out == {"epochs": 5} and env_out == {"sigma": 0.5}
    assert train == {"epochs": 3}


def test_config_hash_ignores_key_order():
    """The digest depends on content only."""
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
    assert len(config_hash({})) == 64


def test_write_toml(tmpdir):
    """Written TOML loads back."""
    path = str(tmpdir.join("resolved.toml"))
    write_toml({"train": {"seed": 1}, "env": {"bounds": [0.0, 1.0]}}, path)
    assert toml.load(path) == {"train": {"seed": 1}, "env": {"bounds": [0.0, 1.0]}}
