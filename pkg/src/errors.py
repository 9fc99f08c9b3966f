"""
Exception hierarchy shared by every jamsense component.
"""
from typing import Optional


class JamsenseError(Exception):
    """Base class for all jamsense errors."""


class ConfigError(JamsenseError):
    """Invalid configuration value or non-monotone lookup table."""


# Telemetry

class RangeError(JamsenseError):
    """A KPI field is outside its valid range."""

    def __init__(self, field: str, value: object = None):
        self.field = field
        self.value = value
        super().__init__(f"{field} out of range: {value!r}")


class DecodeError(JamsenseError):
    """Malformed wire record."""


# Signal preparation and labeling

class EmptyInput(JamsenseError):
    """An operation received an empty series."""


class DegenerateBatch(JamsenseError):
    """Batch standard deviation is below epsilon; it cannot be scaled."""


class TooShort(JamsenseError):
    """Batch has fewer than two values."""


class DegenerateData(JamsenseError):
    """Data cannot support a two-component mixture fit."""


# Detector

class InsufficientData(JamsenseError):
    """Not enough samples or windows for the requested operation."""


class SingleClassData(JamsenseError):
    """Training data contains only one class."""


class ShapeError(JamsenseError):
    """Input does not match the model's input dimension."""


class FormatError(JamsenseError):
    """Model file is corrupt or not a jamsense model."""


class VersionError(JamsenseError):
    """Model file was written by a newer format version."""


# Store

class OutOfOrder(JamsenseError):
    """Record timestamp is older than the last record in the series."""


class UnknownSeries(JamsenseError):
    """Series name is not declared by the store."""


class StoreIOError(JamsenseError):
    """Underlying file operation failed."""


# Training manager and service

class NotEnoughData(JamsenseError):
    """Too few labeled samples to (re)train."""


class NotifyTimeout(JamsenseError):
    """The detection service did not acknowledge a model update in time."""

    def __init__(self, version: int, reason: Optional[str] = None):
        self.version = version
        super().__init__(f"model update v{version} not acknowledged: {reason}")


class FetchError(JamsenseError):
    """Requested model version is not in the registry."""


class BindError(JamsenseError):
    """A listener address could not be bound at startup."""


class ComponentStartupError(JamsenseError):
    """A closed-loop component could not be started."""


class ExperimentAborted(JamsenseError):
    """An experiment stopped before the schedule was exhausted."""
