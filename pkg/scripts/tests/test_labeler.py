"""
Tests for the batch labeler: retrain trigger, Hold, model reuse and streaming.
"""
import numpy as np
import pytest

from conftest import make_sample, on_off_stream
from src.labeler.labeler import (
    GmmLabeler,
    LabelerConfig,
    LabelerState,
    label_batch,
    run_labeler,
    should_retrain,
)
from src.labeler.prep import Batch, moving_average
from src.sim.config import SimConfig
from src.sim.simulator import generate_stream
from src.store.timeseries import MemoryTimeSeriesStore
from src.telemetry.types import Label, ScenarioPhase, ScenarioSchedule


def _transition_batch(seed=0):
    """30 smoothed SNR values: 15 jammed, then 15 clean."""
    items = generate_stream(
        ScenarioSchedule(phases=[ScenarioPhase.on(-8, 0.056, 1.5), ScenarioPhase.off(0.056, 1.5)]),
        SimConfig(seed=seed),
    )
    snr = moving_average([s.ul_snr for s, _ in items])
    return Batch.of(snr), [truth for _, truth in items]


def test_step_batch_triggers():
    batch, _ = _transition_batch()
    assert should_retrain(batch, 0.0004)


def test_trigger_ignores_constant_shift():
    batch, _ = _transition_batch()
    shifted = Batch.of(batch.values + 40.0)
    assert should_retrain(shifted, 0.0004) == should_retrain(batch, 0.0004)


@pytest.mark.parametrize("seed", range(3))
def test_transition_batch_labeled(seed):
    """A fresh fit on an OFF/ON step gets at least 27 of 30 labels right."""
    batch, truth = _transition_batch(seed)
    labels, state = label_batch(LabelerState(), batch)
    assert state.model is not None
    correct = sum(1 for got, want in zip(labels, truth) if got is not None and int(got) == want)
    assert correct >= 27


def test_flat_batch_without_model_is_held():
    rng = np.random.default_rng(0)
    batch = Batch.of(25.0 + rng.normal(0, 0.05, 30))
    labels, state = label_batch(LabelerState(), batch)
    assert labels == [None] * 30
    assert state.model is None


def test_constant_batch_is_held():
    labels, _ = label_batch(LabelerState(), Batch.of([25.0] * 30))
    assert labels == [None] * 30


def test_model_is_reused_on_clean_batch():
    batch, _ = _transition_batch()
    _, state = label_batch(LabelerState(), batch)
    rng = np.random.default_rng(1)
    # not contiguous with the transition batch, so any refit sees clean data only
    clean = Batch.of(25.0 + rng.normal(0, 0.05, 30), start_idx=batch.end_idx + 60)
    labels, next_state = label_batch(state, clean)
    assert labels == [Label.NO_INTERFERENCE] * 30
    assert next_state.model is state.model
    assert next_state.last_change_idx == state.last_change_idx


def test_stream_shorter_than_a_batch():
    stream = [make_sample(i * 100) for i in range(20)]
    assert run_labeler(stream) == []


def test_off_only_stream_is_held():
    items = generate_stream(ScenarioSchedule(phases=[ScenarioPhase.off(0.056, 60)]), SimConfig(seed=2))
    labeled = run_labeler([s for s, _ in items])
    assert len(labeled) == 600
    assert all(ls.is_hold for ls in labeled)


def test_on_off_stream_agrees_with_truth():
    items = on_off_stream(phase_s=30.0, cycles=2)
    store = MemoryTimeSeriesStore()
    labeled = run_labeler([s for s, _ in items], store=store)
    assert len(store.query_labeled(0, 10 ** 9)) == len(labeled) == len(items)

    boundaries = [300, 600, 900]
    scored = [
        (ls.label, truth) for i, (ls, (_, truth)) in enumerate(zip(labeled, items))
        if not ls.is_hold and all(abs(i - b) > 30 for b in boundaries)
    ]
    assert len(scored) > 500
    agreement = np.mean([int(label) == truth for label, truth in scored])
    assert agreement >= 0.95


def test_streaming_matches_offline():
    """Pushing in uneven chunks labels exactly like the offline run."""
    items = on_off_stream(phase_s=20.0, cycles=2, seed=4)
    samples = [s for s, _ in items]
    offline = run_labeler(samples, LabelerConfig())

    labeler = GmmLabeler(LabelerConfig())
    streamed = []
    pos = 0
    for size in [1, 7, 30, 3, 64] * 20:
        streamed.extend(labeler.push(samples[pos:pos + size]))
        pos += size
        if pos >= len(samples):
            break
    streamed.extend(labeler.push(samples[pos:]))
    streamed.extend(labeler.flush())
    assert [ls.label for ls in streamed] == [ls.label for ls in offline]
    assert [ls.timestamp_ms for ls in streamed] == [ls.timestamp_ms for ls in offline]


def test_streaming_waits_for_lookahead():
    labeler = GmmLabeler(LabelerConfig(batch_size=30, window_w=5))
    assert labeler.push([make_sample(i * 100) for i in range(31)]) == []
    assert len(labeler.push([make_sample(3100)])) == 30
