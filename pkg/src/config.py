"""The config file."""

import os

# Logging constants
LOGGING_LEVEL = os.environ.get("RCSAC_LOGGING_LEVEL", "INFO")

# Config presets
PRESETS_DIR = os.environ.get(
    "RCSAC_PRESETS_DIR",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "cfg"))

# Network constants
HIDDEN_WIDTH = int(os.environ.get("RCSAC_HIDDEN_WIDTH", "256"))
LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
TANH_EPS = 1e-6
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
NETWORK_NAMES = ("policy", "q1", "q2", "q1_target", "q2_target", "risk", "risk_target")
TRAINABLE_NETWORKS = ("policy", "q1", "q2", "risk")

# Risk estimation constants
RISK_MC_SAMPLES = int(os.environ.get("RCSAC_RISK_MC_SAMPLES", "500"))
MIN_ACCURATE_RISK_SAMPLES = 500
REJECTION_SAMPLING_TRIES = 10000

# Output file names
CHECKPOINT_FILENAME = "checkpoint.json"
LOG_FILENAME = "log.csv"
RESOLVED_CONFIG_FILENAME = "resolved.toml"
EVAL_FILENAME = "eval.csv"
SWEEP_FILENAME = "sweep.csv"
SEEDS_FILENAME = "seeds.csv"
TRACES_FILENAME = "traces.json"
PATHS_FILENAME = "paths.svg"
NAN_DUMP_FILENAME = "nan_dump.json"

# Schema versions
CHECKPOINT_FORMAT_VERSION = 1
TRACES_SCHEMA_VERSION = 1

# Exit codes
EXIT_OK = 0
EXIT_TEST_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL_ABORT = 3
