"""
Tests for KPI samples, the wire codec and scenario schedules.
"""
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from conftest import make_sample
from src.errors import ConfigError, DecodeError, RangeError
from src.telemetry.types import (
    EventKind,
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
from src.telemetry.wire import decode_labeled, decode_sample, encode_labeled, encode_sample


def test_valid_sample_passes():
    """A clean operating-point sample is accepted unchanged."""
    s = make_sample(0, snr=25.0, mcs=24, bitrate=20.0, bler=0.01)
    assert validate_sample(s) is s


@pytest.mark.parametrize("kwargs, field", [
    ({"bler": 1.5}, "ul_bler"),
    ({"mcs": 29}, "ul_mcs"),
    ({"mcs": -1}, "ul_mcs"),
    ({"bitrate": -0.1}, "ul_bitrate"),
    ({"snr": math.nan}, "ul_snr"),
    ({"snr": math.inf}, "ul_snr"),
])
def test_range_error_names_field(kwargs, field):
    """Out-of-range values are reported by field name."""
    with pytest.raises(RangeError) as exc:
        validate_sample(make_sample(0, **kwargs))
    assert exc.value.field == field


def test_first_violated_field_is_reported():
    """With several violations the earliest declared field wins."""
    with pytest.raises(RangeError) as exc:
        validate_sample(make_sample(-5, snr=math.nan, bler=2.0))
    assert exc.value.field == "timestamp_ms"


def test_encode_is_one_line():
    line = encode_sample(make_sample(1234))
    assert line.endswith(b"\n")
    assert line.count(b"\n") == 1
    assert set(json.loads(line)) == {"ts", "ul_snr", "ul_mcs", "ul_bitrate", "ul_bler"}


def test_encode_rejects_invalid_sample():
    with pytest.raises(RangeError):
        encode_sample(make_sample(0, bler=1.5))


@given(
    ts=st.integers(min_value=0, max_value=2 ** 53),
    snr=st.floats(min_value=-50, max_value=60, allow_nan=False),
    mcs=st.integers(min_value=0, max_value=28),
    bitrate=st.floats(min_value=0, max_value=1000, allow_nan=False),
    bler=st.floats(min_value=0, max_value=1, allow_nan=False),
)
def test_decode_inverts_encode(ts, snr, mcs, bitrate, bler):
    s = make_sample(ts, snr=snr, mcs=mcs, bitrate=bitrate, bler=bler)
    assert decode_sample(encode_sample(s)) == s


def test_truncated_record_is_decode_error():
    line = encode_sample(make_sample(10))
    with pytest.raises(DecodeError):
        decode_sample(line[: len(line) // 2])


def test_renamed_field_is_decode_error():
    record = json.loads(encode_sample(make_sample(10)))
    record["snr"] = record.pop("ul_snr")
    with pytest.raises(DecodeError) as exc:
        decode_sample(json.dumps(record))
    assert "snr" in str(exc.value)


def test_decoded_out_of_range_value_is_range_error():
    record = json.loads(encode_sample(make_sample(10)))
    record["ul_bler"] = 3.0
    with pytest.raises(RangeError):
        decode_sample(json.dumps(record))


def test_labeled_hold_survives_store_format():
    """Hold is written as a null label and read back as None."""
    held = LabeledSample(make_sample(5), None, LabelSource.AUTO_GMM, batch_id=3)
    labeled = LabeledSample(make_sample(6), Label.INTERFERENCE, LabelSource.AUTO_GMM, batch_id=3)
    assert decode_labeled(encode_labeled(held)) == held
    assert decode_labeled(encode_labeled(labeled)).label == Label.INTERFERENCE


def test_event_and_prediction_records():
    event = LoopEvent(100, EventKind.MODEL_SWAPPED, 2, "old=1")
    assert LoopEvent.from_record(event.to_record()) == event
    prediction = Prediction(200, 1, 0.9, 2)
    assert Prediction.from_record(prediction.to_record()) == prediction


def test_off_phase_requires_floor_power():
    with pytest.raises(ValidationError):
        ScenarioPhase(duration_s=10, int_event=False, int_db=-20.0, noise_amp=0.1)
    phase = ScenarioPhase.off(0.1, 10)
    assert phase.interference_db == -100.0


def test_phase_accepts_wire_names():
    phase = ScenarioPhase.model_validate({"duration_s": 5, "int_event": True, "int_db": -8, "noise_amp": 0.056})
    assert phase.interference_event and phase.noise_amplitude == 0.056


def test_schedule_sample_counts():
    schedule = ScenarioSchedule(phases=[ScenarioPhase.on(-8, 0.056, 60), ScenarioPhase.off(0.056, 30)])
    assert schedule.total_duration_s == 90
    assert [schedule.samples_in(p) for p in schedule.phases] == [600, 300]
    assert schedule.window_ids() == ["1", "2"]


def test_load_schedule(tmp_path):
    path = tmp_path / "schedule.json"
    path.write_text(json.dumps([
        {"duration_s": 30, "int_event": True, "int_db": -8, "noise_amp": 0.056, "name": "on"},
        {"duration_s": 30, "int_event": False, "int_db": -100, "noise_amp": 0.056, "name": "off"},
    ]))
    schedule = load_schedule(path)
    assert schedule.window_ids() == ["on", "off"]

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_schedule(bad)
