"""Exception types raised across the firewatch package."""

from __future__ import annotations


class FirewatchError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidInputError(FirewatchError):
    """An argument violates a documented precondition."""


class TrainingError(FirewatchError):
    """The training set cannot be trained on (e.g. only one class present)."""


class ParseError(FirewatchError):
    """A device message could not be decoded into a reading.

    ``raw`` holds the offending message text for diagnostics.
    """

    def __init__(self, message: str, raw: str | None = None):
        super().__init__(message)
        self.raw = raw


class FrameError(ParseError):
    """The ``*``/``#`` frame delimiters are missing or out of order."""


class ArityError(ParseError):
    """The framed payload does not contain exactly three fields."""


class NumericError(ParseError):
    """A framed field is not a finite decimal number."""


class SchemaError(FirewatchError):
    """A dataset or model file does not match its documented layout."""


class ConfigError(FirewatchError):
    """A configuration value is unusable (bad fraction, dead output path, ...)."""


class TransportError(FirewatchError):
    """An HTTP poll failed at the network level; retrying may succeed."""
