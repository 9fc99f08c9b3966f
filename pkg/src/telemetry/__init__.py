"""Shared KPI types, validation and wire formats"""
from .types import (
    KPI_CHANNELS,
    EventKind,
    KpiSample,
    Label,
    LabeledSample,
    LabelSource,
    LoopEvent,
    Prediction,
    ScenarioPhase,
    ScenarioSchedule,
    load_schedule,
    validate_sample,
)
from .wire import (
    decode_labeled,
    decode_sample,
    encode_labeled,
    encode_sample,
    labeled_to_record,
    record_to_labeled,
    record_to_sample,
    sample_to_record,
)

__all__ = [
    "KPI_CHANNELS",
    "EventKind",
    "KpiSample",
    "Label",
    "LabeledSample",
    "LabelSource",
    "LoopEvent",
    "Prediction",
    "ScenarioPhase",
    "ScenarioSchedule",
    "load_schedule",
    "validate_sample",
    "decode_labeled",
    "decode_sample",
    "encode_labeled",
    "encode_sample",
    "labeled_to_record",
    "record_to_labeled",
    "record_to_sample",
    "sample_to_record",
]
