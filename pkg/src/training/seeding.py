"""Named, independent random streams derived from one master seed."""

import zlib

import numpy as np

STREAM_NAMES = ("init", "env", "policy", "buffer", "risk", "eval")


def _stream_key(name):
    return zlib.crc32(name.encode("utf-8"))


def named_stream(seed, name, *counter):
    """Philox generator for ``(seed, name, *counter)``; same inputs, same stream."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(_stream_key(name),) + tuple(
        int(c) for c in counter))
    return np.random.Generator(np.random.Philox(sequence))


def seed_everything(seed, names=STREAM_NAMES):
    """Derive one independent generator per stream name from the master seed."""
    return {name: named_stream(seed, name) for name in names}


def risk_label_stream(seed, step):
    """Generator used to label the immediate risk of environment step ``step``.

    One substream per step lets any stored label be recomputed from the seed alone.
    """
    return named_stream(seed, "risk", step)
