"""
Sliding feature windows over labeled KPI samples.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import InsufficientData
from ..telemetry.types import KPI_CHANNELS, KpiSample, LabeledSample

WINDOW_STEPS = 15
N_CHANNELS = len(KPI_CHANNELS)


@dataclass(frozen=True)
class FeatureWindow:
    """
    Raw KPI values of consecutive steps, oldest first, flattened as
    [snr, mcs, bitrate, bler] per step. label is the newest sample's label.
    """
    values: np.ndarray
    label: Optional[int] = None
    end_ts: Optional[int] = None

    @classmethod
    def from_samples(cls, samples: Sequence[KpiSample], label: Optional[int] = None) -> "FeatureWindow":
        values = np.asarray([s.features() for s in samples], dtype=np.float64).ravel()
        return cls(values=values, label=label, end_ts=samples[-1].timestamp_ms)


def build_windows(
    labeled: Sequence[LabeledSample],
    win: int = WINDOW_STEPS,
    stride: int = 1,
    max_gap_ms: Optional[int] = None,
) -> List[FeatureWindow]:
    """
    Cut labeled samples into training windows.

    Windows containing a held sample, or a timestamp gap above max_gap_ms, are
    dropped.

    Args:
        labeled: Samples in stream order
        win: Steps per window
        stride: Steps between window starts
        max_gap_ms: Largest allowed gap between neighbouring samples

    Returns:
        One window per stride step, labeled with its newest sample

    Raises:
        InsufficientData: no complete window could be built
    """
    n = len(labeled)
    if n < win:
        raise InsufficientData(f"need {win} samples for one window, got {n}")

    feats = np.asarray([ls.sample.features() for ls in labeled], dtype=np.float64)
    held = np.asarray([ls.label is None for ls in labeled])
    labels = np.asarray([-1 if ls.label is None else int(ls.label) for ls in labeled])
    ts = np.asarray([ls.timestamp_ms for ls in labeled], dtype=np.int64)

    # bad[i] marks a window boundary problem between sample i-1 and i
    held_count = np.concatenate([[0], np.cumsum(held)])
    gap_breaks = np.zeros(n, dtype=bool)
    if max_gap_ms is not None and n > 1:
        gap_breaks[1:] = np.diff(ts) > max_gap_ms
    gap_count = np.concatenate([[0], np.cumsum(gap_breaks)])

    windows = []
    for start in range(0, n - win + 1, stride):
        end = start + win
        if held_count[end] - held_count[start] > 0:
            continue
        if gap_count[end] - gap_count[start + 1] > 0:
            continue
        windows.append(FeatureWindow(
            values=feats[start:end].ravel(),
            label=int(labels[end - 1]),
            end_ts=int(ts[end - 1]),
        ))

    if not windows:
        raise InsufficientData(f"no {win}-step window without held samples")
    return windows


def windows_to_arrays(windows: Sequence[FeatureWindow]) -> Tuple[np.ndarray, np.ndarray]:
    """Stack windows into (X, y); unlabeled windows get y = -1."""
    if not windows:
        raise InsufficientData("no windows")
    X = np.stack([w.values for w in windows]).astype(np.float64)
    y = np.asarray([-1 if w.label is None else w.label for w in windows], dtype=np.int64)
    return X, y
