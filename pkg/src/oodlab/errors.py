"""Shared exception taxonomy.

Four failure classes cover the whole library: bad runtime inputs (shapes,
NaNs, empty vectors), bad configuration (unknown keys, inconsistent
choices), training divergence (non-finite loss or parameters, carries a
diagnostic payload), and checkpoint I/O corruption.
"""


class OodLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(OodLabError, ValueError):
    """A runtime argument violates an operation's precondition."""


class ConfigError(OodLabError, ValueError):
    """A configuration document or option combination is invalid."""


class TrainingDivergenceError(OodLabError, RuntimeError):
    """Training produced a non-finite loss, gradient, or parameter.

    Attributes:
        iteration: training step at which divergence was detected (or None).
        details: free-form diagnostic payload (loss values, offending layer).
    """

    def __init__(self, message: str, iteration: int | None = None, details: dict | None = None):
        super().__init__(message)
        self.iteration = iteration
        self.details = details or {}


class CheckpointError(OodLabError, OSError):
    """A checkpoint file is missing, truncated, or malformed."""
