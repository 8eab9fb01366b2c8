"""Exceptions raised by the risk-conditioned SAC package."""


class RiskSACError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(RiskSACError, ValueError):
    """Invalid configuration, dimension mismatch or unusable maze."""


class RiskDomainError(RiskSACError, ValueError):
    """A probability-valued quantity fell outside [0, 1]."""


class BufferEmptyError(RiskSACError, LookupError):
    """Sampling was requested from an empty replay buffer."""


class NumericalAbort(RiskSACError, RuntimeError):
    """A loss became non-finite during training.

    :param batch: The offending batch (dict of arrays), kept for the diagnostic dump.
    :param diagnostics: The per-loss values at the time of the abort.
    """

    def __init__(self, message, batch=None, diagnostics=None, dump_path=None):
        """Keep the batch and diagnostics next to the message."""
        super().__init__(message)
        self.batch = batch
        self.diagnostics = diagnostics or {}
        self.dump_path = dump_path
