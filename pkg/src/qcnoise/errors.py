"""Exception types raised by the toolkit.

Every violation carries the measured ``defect`` so callers (and the CLI) can
report how badly an invariant was broken.
"""

from __future__ import annotations


class QCNoiseError(ValueError):
    """Base class for all input and invariant violations."""

    def __init__(self, message: str, defect: float | None = None):
        self.defect = defect
        if defect is not None:
            message = f"{message} (defect {defect:.3g})"
        super().__init__(message)

    @property
    def kind(self) -> str:
        return type(self).__name__


class DimensionMismatch(QCNoiseError):
    pass


class IndexOutOfRange(QCNoiseError):
    pass


class NotHermitian(QCNoiseError):
    pass


class NotPositive(QCNoiseError):
    pass


class TraceNotOne(QCNoiseError):
    pass


class NotQubit(QCNoiseError):
    pass


class BlochNormExceeded(QCNoiseError):
    pass


class NotNormalized(QCNoiseError):
    pass


class BadParameter(QCNoiseError):
    pass


class NotTracePreserving(QCNoiseError):
    pass


class EmptyKrausList(QCNoiseError):
    pass


class ChannelCannotCreate(QCNoiseError):
    """The channel is unital or semi-classical, so no witness input exists."""


class WitnessSearchExhausted(QCNoiseError):
    pass


class MalformedInput(QCNoiseError):
    """JSON input that does not follow the documented layout."""
