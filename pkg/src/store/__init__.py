"""Append-only time-series store for samples, labels, predictions and events"""
from .timeseries import (
    DEFAULT_SERIES,
    EVENTS,
    GROUND_TRUTH,
    LABELED,
    PREDICTIONS,
    RAW,
    FileTimeSeriesStore,
    MemoryTimeSeriesStore,
    TimeSeriesStore,
    create_store,
)

__all__ = [
    "DEFAULT_SERIES",
    "EVENTS",
    "GROUND_TRUTH",
    "LABELED",
    "PREDICTIONS",
    "RAW",
    "FileTimeSeriesStore",
    "MemoryTimeSeriesStore",
    "TimeSeriesStore",
    "create_store",
]
