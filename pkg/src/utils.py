"""Some helper functions."""

import hashlib
import json
import os

import toml
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from src.exceptions import ConfigurationError


def convert_string2bool_env(parameter):
    """Convert the String True/False to its boolean form.

    :param parameter: The string that needs to be converted.
    """
    return parameter.lower() == "true"


def load_config_file(path):
    """Read a TOML, JSON or YAML config file into a plain dict.

    :param path: Path of the config file, the format is picked from the extension.
    :raises ConfigurationError: If the file is missing, unreadable or not a mapping.
    """
    if not os.path.isfile(path):
        raise ConfigurationError("Config file {} does not exist".format(path))
    extension = os.path.splitext(path)[1].lower()
    try:
        with open(path, encoding="utf-8") as handle:
            if extension == ".toml":
                content = toml.load(handle)
            elif extension == ".json":
                content = json.load(handle)
            elif extension in (".yaml", ".yml"):
                content = YAML(typ="safe").load(handle)
            else:
                raise ConfigurationError(
                    "Unsupported config format '{}' for {}".format(extension, path))
    except (ValueError, TypeError, YAMLError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError("Unable to parse {}: {}".format(path, exc)) from exc
    if not isinstance(content, dict):
        raise ConfigurationError("Config file {} must hold a mapping".format(path))
    return content


def parse_override(text):
    """Split a ``key=value`` override, parsing the value as a JSON literal when possible."""
    if "=" not in text:
        raise ConfigurationError("Override '{}' is not of the form key=value".format(text))
    key, raw_value = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigurationError("Override '{}' has an empty key".format(text))
    try:
        value = json.loads(raw_value)
    except ValueError:
        value = raw_value.strip()
    return key, value


def apply_overrides(train_dict, env_dict, overrides):
    """Apply ``key=value`` overrides; keys prefixed with ``env.`` go to the maze config."""
    train_dict = dict(train_dict)
    env_dict = dict(env_dict)
    for text in overrides or ():
        key, value = parse_override(text)
        if key.startswith("env."):
            env_dict[key[len("env."):]] = value
        else:
            train_dict[key] = value
    return train_dict, env_dict


def canonical_json(content):
    """Serialize a config dict deterministically."""
    return json.dumps(content, sort_keys=True, separators=(",", ":"))


def config_hash(content):
    """Return the SHA-256 hex digest of the canonical JSON form of a config dict."""
    return hashlib.sha256(canonical_json(content).encode("utf-8")).hexdigest()


def write_toml(content, path):
    """Write a dict as TOML."""
    with open(path, "w", encoding="utf-8") as handle:
        toml.dump(content, handle)
