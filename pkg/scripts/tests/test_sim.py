"""
Tests for the KPI simulator and the built-in scenarios.
"""
import numpy as np
import pytest

from src.errors import ConfigError
from src.sim.config import SimConfig
from src.sim.scenarios import TABLE1_ROWS, named_schedule, table1_pair_schedule, table1_phase
from src.sim.simulator import RanSimulator, generate_stream, run_table1_suite
from src.telemetry.types import Label, ScenarioPhase, ScenarioSchedule, validate_sample


def _single(phase, seed=0):
    return generate_stream(ScenarioSchedule(phases=[phase]), SimConfig(seed=seed))


def _column(items, name):
    return np.asarray([getattr(s, name) for s, _ in items], dtype=float)


def test_clean_operating_point():
    """Without noise or jammer the link sits at SNR 25, MCS 24, 20 Mbps, 1% BLER."""
    items = _single(ScenarioPhase.off(0.0, 5))
    s = items[-1][0]
    assert s.ul_snr == 25.0
    assert s.ul_mcs == 24
    assert s.ul_bitrate == pytest.approx(20.0)
    assert s.ul_bler == pytest.approx(0.01, abs=0.001)


def test_clean_mean_snr():
    items = _single(ScenarioPhase.off(0.056, 100), seed=3)
    assert len(items) == 1000
    assert abs(np.mean(_column(items, "ul_snr")) - 25.0) < 0.5
    assert all(truth == Label.NO_INTERFERENCE for _, truth in items)


def test_jammer_degradation_calibration():
    sim = RanSimulator()
    assert sim.degradation(ScenarioPhase.on(-40, 0.056, 1)) == pytest.approx(2.0)
    assert sim.degradation(ScenarioPhase.on(-8, 0.056, 1)) == pytest.approx(15.0, abs=0.5)
    assert sim.degradation(ScenarioPhase.off(0.056, 1)) == 0.0


def test_stronger_jammer_hurts_more():
    weak = _single(ScenarioPhase.on(-40, 0.056, 50))
    strong = _single(ScenarioPhase.on(-8, 0.056, 50))
    assert np.mean(_column(strong, "ul_snr")) < np.mean(_column(weak, "ul_snr"))
    assert np.mean(_column(strong, "ul_mcs")) <= np.mean(_column(weak, "ul_mcs"))
    assert np.mean(_column(strong, "ul_bitrate")) <= np.mean(_column(weak, "ul_bitrate"))
    assert np.mean(_column(strong, "ul_bler")) >= np.mean(_column(weak, "ul_bler"))
    assert all(truth == Label.INTERFERENCE for _, truth in strong)


def test_more_noise_widens_snr_spread():
    quiet = _single(ScenarioPhase.off(0.056, 50))
    loud = _single(ScenarioPhase.off(0.33, 50))
    assert np.std(_column(loud, "ul_snr")) > 3 * np.std(_column(quiet, "ul_snr"))


def test_seeded_streams_are_reproducible():
    schedule = table1_pair_schedule(1, phase_s=10)
    a = generate_stream(schedule, SimConfig(seed=11))
    b = generate_stream(schedule, SimConfig(seed=11))
    c = generate_stream(schedule, SimConfig(seed=12))
    assert a == b
    assert a != c


def test_samples_are_valid_and_evenly_spaced():
    items = generate_stream(named_schedule("eval12", phase_s=5), start_ms=1000)
    for s, _ in items:
        validate_sample(s)
    ts = [s.timestamp_ms for s, _ in items]
    assert ts[0] == 1000
    assert set(np.diff(ts)) == {100}


@pytest.mark.parametrize("row, expected", [
    (1, (True, -8.0, 0.056)),
    (10, (False, -100.0, 0.15)),
    (17, (True, -40.0, 0.33)),
])
def test_table_rows(row, expected):
    assert TABLE1_ROWS[row] == expected
    phase = table1_phase(row)
    assert (phase.interference_event, phase.interference_db, phase.noise_amplitude) == expected


def test_table_rows_include_middle_power():
    assert TABLE1_ROWS[7] == (True, -20.0, 0.056)
    assert len(TABLE1_ROWS) == 18


def test_table_suite():
    suite = run_table1_suite(duration_s=2)
    assert [row for row, _, _ in suite] == list(range(1, 19))
    assert all(len(stream) == 20 for _, _, stream in suite)


def test_pair_schedule_needs_on_row():
    with pytest.raises(ConfigError):
        table1_pair_schedule(2)
    schedule = table1_pair_schedule(3, phase_s=30, cycles=2)
    assert [p.name for p in schedule.phases] == ["row3", "row4", "row3", "row4"]


def test_evaluation_schedule():
    schedule = named_schedule("eval12")
    assert schedule.window_ids() == [f"{g}{c}" for g in "12" for c in "abcdef"]
    assert [p.interference_event for p in schedule.phases[:2]] == [True, False]
    assert {p.noise_amplitude for p in schedule.phases[:6]} == {0.1}
    assert {p.noise_amplitude for p in schedule.phases[6:]} == {0.333}
    assert all(p.duration_s == 60 for p in schedule.phases)


def test_unknown_schedule():
    with pytest.raises(ConfigError):
        named_schedule("nope")


def test_bad_mcs_table():
    with pytest.raises(ConfigError):
        SimConfig(mcs_table=[0.0, 1.0])
    with pytest.raises(ConfigError):
        SimConfig(mcs_table=[float(28 - m) for m in range(29)])


@pytest.mark.parametrize("field, value", [
    ("noise_amp_to_sigma", 0.0),
    ("interference_coupling", -1.0),
    ("mcs_backoff_db", -0.5),
    ("link_smoothing", 0),
    ("reference_mcs", 29),
])
def test_out_of_range_field_is_config_error(field, value):
    with pytest.raises(ConfigError, match=field):
        SimConfig(**{field: value})
