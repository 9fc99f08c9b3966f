"""
Canonical wire forms: one JSON object per LF-terminated line.
"""
import json
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, StrictFloat, StrictInt, ValidationError

from ..errors import DecodeError
from .types import KpiSample, Label, LabeledSample, LabelSource, validate_sample


class WireSample(BaseModel):
    """Schema of the stream record `{"ts","ul_snr","ul_mcs","ul_bitrate","ul_bler"}`."""
    model_config = ConfigDict(extra="forbid", strict=True)

    ts: StrictInt
    ul_snr: StrictFloat
    ul_mcs: StrictInt
    ul_bitrate: StrictFloat
    ul_bler: StrictFloat


def sample_to_record(s: KpiSample) -> Dict[str, Any]:
    return {
        "ts": s.timestamp_ms,
        "ul_snr": float(s.ul_snr),
        "ul_mcs": int(s.ul_mcs),
        "ul_bitrate": float(s.ul_bitrate),
        "ul_bler": float(s.ul_bler),
    }


def record_to_sample(record: Dict[str, Any]) -> KpiSample:
    """Build and validate a sample from an already-parsed record."""
    return validate_sample(KpiSample(
        timestamp_ms=record["ts"],
        ul_snr=float(record["ul_snr"]),
        ul_mcs=record["ul_mcs"],
        ul_bitrate=float(record["ul_bitrate"]),
        ul_bler=float(record["ul_bler"]),
    ))


def encode_sample(s: KpiSample) -> bytes:
    """
    Encode a valid sample as one UTF-8 line.

    Args:
        s: Sample to encode

    Returns:
        LF-terminated JSON bytes
    """
    validate_sample(s)
    return (json.dumps(sample_to_record(s), separators=(",", ":")) + "\n").encode("utf-8")


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first.get("loc", ())) or "<record>"
    if first["type"] == "extra_forbidden":
        return f"unknown field {loc}"
    if first["type"] == "missing":
        return f"missing field {loc}"
    return f"{loc}: {first['msg']}"


def decode_sample(data: Union[bytes, str]) -> KpiSample:
    """
    Decode one wire line into a validated sample.

    Args:
        data: One record, with or without its trailing LF

    Returns:
        Decoded sample

    Raises:
        DecodeError: malformed JSON or schema violation
        RangeError: well-formed record with an out-of-range value
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DecodeError(f"not UTF-8: {e}") from e
    try:
        wire = WireSample.model_validate_json(data.rstrip("\n"))
    except ValidationError as e:
        raise DecodeError(_describe(e)) from e
    return record_to_sample(wire.model_dump())


def labeled_to_record(ls: LabeledSample) -> Dict[str, Any]:
    """Store form of a labeled sample; Hold is written as label null."""
    record = sample_to_record(ls.sample)
    record["label"] = None if ls.label is None else int(ls.label)
    record["source"] = ls.source.value
    record["batch_id"] = ls.batch_id
    return record


def record_to_labeled(record: Dict[str, Any]) -> LabeledSample:
    label: Optional[Label] = None if record.get("label") is None else Label(record["label"])
    return LabeledSample(
        sample=record_to_sample(record),
        label=label,
        source=LabelSource(record.get("source", LabelSource.AUTO_GMM.value)),
        batch_id=int(record.get("batch_id", -1)),
    )


def encode_labeled(ls: LabeledSample) -> bytes:
    return (json.dumps(labeled_to_record(ls), separators=(",", ":")) + "\n").encode("utf-8")


def decode_labeled(data: Union[bytes, str]) -> LabeledSample:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        record = json.loads(data)
    except json.JSONDecodeError as e:
        raise DecodeError(f"malformed labeled record: {e}") from e
    try:
        return record_to_labeled(record)
    except (KeyError, ValueError, TypeError) as e:
        raise DecodeError(f"malformed labeled record: {e}") from e
