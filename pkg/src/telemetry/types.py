"""
Domain types for uplink KPI telemetry, labels, scenarios and loop events.
"""
import json
import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..errors import ConfigError, RangeError

# Feature channel order inside a detector window
KPI_CHANNELS: Tuple[str, ...] = ("ul_snr", "ul_mcs", "ul_bitrate", "ul_bler")

MCS_MIN = 0
MCS_MAX = 28
OFF_INTERFERENCE_DB = -100.0


class Label(IntEnum):
    """Binary interference label."""
    NO_INTERFERENCE = 0
    INTERFERENCE = 1


class LabelSource(str, Enum):
    """Where a label came from."""
    AUTO_GMM = "auto_gmm"
    GROUND_TRUTH_SIM = "ground_truth_sim"


class EventKind(str, Enum):
    """Kinds of closed-loop audit events."""
    DRIFT_DETECTED = "drift_detected"
    RETRAIN_STARTED = "retrain_started"
    RETRAIN_COMPLETED = "retrain_completed"
    MODEL_SWAPPED = "model_swapped"
    PERIODIC_RETRAIN = "periodic_retrain"


@dataclass(frozen=True)
class KpiSample:
    """One timestamped uplink KPI tuple."""
    timestamp_ms: int
    ul_snr: float
    ul_mcs: int
    ul_bitrate: float
    ul_bler: float

    def features(self) -> Tuple[float, float, float, float]:
        """Return the KPI values in detector channel order."""
        return (self.ul_snr, float(self.ul_mcs), self.ul_bitrate, self.ul_bler)


def validate_sample(raw: KpiSample) -> KpiSample:
    """
    Check every KpiSample invariant, in field declaration order.

    Args:
        raw: Sample to check

    Returns:
        The same sample if it is valid

    Raises:
        RangeError: naming the first violated field
    """
    ts = raw.timestamp_ms
    if isinstance(ts, bool) or not isinstance(ts, int) or ts < 0:
        raise RangeError("timestamp_ms", ts)
    if not _is_finite_real(raw.ul_snr):
        raise RangeError("ul_snr", raw.ul_snr)
    mcs = raw.ul_mcs
    if isinstance(mcs, bool) or not isinstance(mcs, int) or not MCS_MIN <= mcs <= MCS_MAX:
        raise RangeError("ul_mcs", mcs)
    if not _is_finite_real(raw.ul_bitrate) or raw.ul_bitrate < 0:
        raise RangeError("ul_bitrate", raw.ul_bitrate)
    if not _is_finite_real(raw.ul_bler) or not 0.0 <= raw.ul_bler <= 1.0:
        raise RangeError("ul_bler", raw.ul_bler)
    return raw


def _is_finite_real(value: Any) -> bool:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    return math.isfinite(value)


@dataclass(frozen=True)
class LabeledSample:
    """
    A KPI sample with its interference label.

    A label of None means Hold: the labeler had no model for this batch yet.
    Held samples are stored but never used for training.
    """
    sample: KpiSample
    label: Optional[Label]
    source: LabelSource
    batch_id: int

    @property
    def is_hold(self) -> bool:
        return self.label is None

    @property
    def timestamp_ms(self) -> int:
        return self.sample.timestamp_ms


class ScenarioPhase(BaseModel):
    """Jammer and noise configuration for one stretch of time."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    duration_s: float = Field(..., gt=0, description="Phase length in seconds")
    interference_event: bool = Field(..., alias="int_event", description="Jammer ON/OFF")
    interference_db: float = Field(..., alias="int_db", description="Jammer power in dB")
    noise_amplitude: float = Field(..., ge=0, alias="noise_amp", description="Noise amplitude")
    name: Optional[str] = Field(None, description="Window id used in reports, e.g. '1a'")

    @model_validator(mode="after")
    def _off_means_floor(self) -> "ScenarioPhase":
        if not self.interference_event and self.interference_db != OFF_INTERFERENCE_DB:
            raise ValueError(
                f"OFF phase must use {OFF_INTERFERENCE_DB} dB, got {self.interference_db}"
            )
        return self

    @classmethod
    def on(cls, interference_db: float, noise_amplitude: float, duration_s: float,
           name: Optional[str] = None) -> "ScenarioPhase":
        return cls(duration_s=duration_s, int_event=True, int_db=interference_db,
                   noise_amp=noise_amplitude, name=name)

    @classmethod
    def off(cls, noise_amplitude: float, duration_s: float,
            name: Optional[str] = None) -> "ScenarioPhase":
        return cls(duration_s=duration_s, int_event=False, int_db=OFF_INTERFERENCE_DB,
                   noise_amp=noise_amplitude, name=name)

    def to_wire(self) -> Dict[str, Any]:
        """Schedule-file form of the phase."""
        record = {
            "duration_s": self.duration_s,
            "int_event": self.interference_event,
            "int_db": self.interference_db,
            "noise_amp": self.noise_amplitude,
        }
        if self.name is not None:
            record["name"] = self.name
        return record


class ScenarioSchedule(BaseModel):
    """Ordered list of phases sampled at a fixed period."""
    model_config = ConfigDict(frozen=True)

    phases: List[ScenarioPhase] = Field(default_factory=list)
    sample_period_ms: int = Field(100, gt=0, description="Sample period in milliseconds")

    @property
    def total_duration_s(self) -> float:
        return sum(phase.duration_s for phase in self.phases)

    def samples_in(self, phase: ScenarioPhase) -> int:
        """Number of samples a phase contributes to a stream."""
        return int(round(phase.duration_s * 1000.0 / self.sample_period_ms))

    def window_ids(self) -> List[str]:
        """Report id of every phase; unnamed phases are numbered from 1."""
        return [phase.name or str(i + 1) for i, phase in enumerate(self.phases)]


def load_schedule(path: Union[str, Path]) -> ScenarioSchedule:
    """
    Load a schedule file.

    The file is either a JSON list of phases, or an object with "phases" and an
    optional "sample_period_ms".

    Args:
        path: Schedule file path

    Returns:
        Parsed schedule (possibly empty; runners reject empty schedules)
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read schedule {path}: {e}") from e

    if isinstance(raw, list):
        raw = {"phases": raw}
    try:
        return ScenarioSchedule.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid schedule {path}: {e}") from e


@dataclass(frozen=True)
class LoopEvent:
    """Audit record of closed-loop activity."""
    timestamp_ms: int
    kind: EventKind
    model_version: Optional[int] = None
    detail: str = ""

    def to_record(self) -> Dict[str, Any]:
        return {
            "ts": self.timestamp_ms,
            "kind": self.kind.value,
            "model_version": self.model_version,
            "detail": self.detail,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "LoopEvent":
        return cls(
            timestamp_ms=int(record["ts"]),
            kind=EventKind(record["kind"]),
            model_version=record.get("model_version"),
            detail=record.get("detail", ""),
        )


@dataclass(frozen=True)
class Prediction:
    """One detection-service output."""
    timestamp_ms: int
    label: int
    p_interference: float
    model_version: int

    def to_record(self) -> Dict[str, Any]:
        return {
            "ts": self.timestamp_ms,
            "label": self.label,
            "p1": self.p_interference,
            "model_version": self.model_version,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "Prediction":
        return cls(
            timestamp_ms=int(record["ts"]),
            label=int(record["label"]),
            p_interference=float(record["p1"]),
            model_version=int(record["model_version"]),
        )
