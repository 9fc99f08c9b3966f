"""
Tests for smoothing, batch scaling and the average-rate-of-change trigger.
"""
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from pydantic import ValidationError

from src.errors import DegenerateBatch, EmptyInput, TooShort
from src.labeler.prep import Batch, SmoothingConfig, arc, moving_average, standard_scale

finite = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)
batches = arrays(np.float64, st.integers(min_value=2, max_value=60), elements=finite)


def test_moving_average_spreads_spike():
    out = moving_average([0, 0, 0, 3, 0, 0, 0], SmoothingConfig(window_w=3))
    np.testing.assert_allclose(out, [0, 0, 1, 1, 1, 0, 0])


def test_moving_average_keeps_constant_series():
    np.testing.assert_allclose(moving_average(np.full(12, 7.5)), np.full(12, 7.5))


def test_moving_average_single_value():
    """A one-sample series is its own average under edge padding."""
    np.testing.assert_allclose(moving_average([4.0], SmoothingConfig(window_w=5)), [4.0])


def test_moving_average_empty():
    with pytest.raises(EmptyInput):
        moving_average([])


def test_even_window_rejected():
    with pytest.raises(ValidationError):
        SmoothingConfig(window_w=4)


@given(batches)
def test_moving_average_preserves_length(values):
    assert len(moving_average(values)) == len(values)


def test_standard_scale_example():
    scaled = standard_scale(Batch.of([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(scaled.values, [-1.2247448714, 0.0, 1.2247448714], atol=1e-9)


def test_standard_scale_constant_batch():
    with pytest.raises(DegenerateBatch):
        standard_scale(Batch.of([2.0] * 10))


@given(batches)
def test_standard_scale_moments(values):
    assume(np.std(values) > 1e-3)
    scaled = standard_scale(Batch.of(values)).values
    assert abs(np.mean(scaled)) < 1e-9
    assert abs(np.std(scaled) - 1.0) < 1e-9


@given(batches)
def test_standard_scale_idempotent(values):
    assume(np.std(values) > 1e-3)
    once = standard_scale(Batch.of(values))
    np.testing.assert_allclose(standard_scale(once).values, once.values, atol=1e-9)


def test_arc_examples():
    assert arc(Batch.of([1.0, 2.0, 3.0])) == pytest.approx(1.0)
    assert arc(Batch.of([5.0, 5.0])) == 0.0


def test_arc_of_scaled_ramp():
    """A linear ramp of 30 values moves by 1/29 of its scaled span per step."""
    ramp = standard_scale(Batch.of(np.arange(30, dtype=float)))
    span = ramp.values[-1] - ramp.values[0]
    assert arc(ramp) == pytest.approx(span / 29)


def test_arc_too_short():
    with pytest.raises(TooShort):
        arc(Batch.of([1.0]))


@settings(max_examples=1000)
@given(batches)
def test_arc_matches_mean_of_differences(values):
    assert arc(Batch.of(values)) == pytest.approx(float(np.mean(np.diff(values))), abs=1e-12, rel=1e-9)


@given(batches, finite)
def test_arc_ignores_constant_shift(values, shift):
    assert arc(Batch.of(values + shift)) == pytest.approx(arc(Batch.of(values)), abs=1e-9)


@given(batches, st.floats(min_value=0.01, max_value=100))
def test_arc_scales_linearly(values, factor):
    assert arc(Batch.of(values * factor)) == pytest.approx(factor * arc(Batch.of(values)), abs=1e-9, rel=1e-9)


def test_batch_span_must_match_values():
    with pytest.raises(ValueError):
        Batch(np.zeros(3), 0, 5)
