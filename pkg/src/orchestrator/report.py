"""
Per-window accuracy and the CSV / plot artifacts of an experiment.
"""
import logging
from pathlib import Path
from typing import List, Sequence

import numpy as np
import pandas as pd

from ..telemetry.types import LoopEvent, ScenarioSchedule
from .loop import ScoredPrediction

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["window_id", "mode", "accuracy", "n_predictions"]
EVENT_COLUMNS = ["mode", "ts", "kind", "model_version", "detail"]


def window_bounds(schedule: ScenarioSchedule) -> List[int]:
    """Sample index at which each phase starts, plus the stream length."""
    bounds = [0]
    for phase in schedule.phases:
        bounds.append(bounds[-1] + schedule.samples_in(phase))
    return bounds


def window_accuracy(
    schedule: ScenarioSchedule,
    scored: Sequence[ScoredPrediction],
    mode: str,
) -> pd.DataFrame:
    """
    Accuracy against ground truth for every phase window.

    Windows without predictions get NaN accuracy.
    """
    bounds = np.asarray(window_bounds(schedule))
    ids = schedule.window_ids()
    hits = np.zeros(len(ids))
    counts = np.zeros(len(ids), dtype=np.int64)
    for p in scored:
        w = int(np.searchsorted(bounds, p.sample_index, side="right")) - 1
        if 0 <= w < len(ids):
            counts[w] += 1
            hits[w] += p.predicted == p.truth
    with np.errstate(invalid="ignore", divide="ignore"):
        accuracy = np.where(counts > 0, hits / np.maximum(counts, 1), np.nan)
    return pd.DataFrame({
        "window_id": ids,
        "mode": mode,
        "accuracy": accuracy,
        "n_predictions": counts,
    }, columns=REPORT_COLUMNS)


def events_frame(events: Sequence[LoopEvent], mode: str) -> pd.DataFrame:
    rows = [{"mode": mode, **event.to_record()} for event in events]
    return pd.DataFrame(rows, columns=EVENT_COLUMNS)


def write_report(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.6f")
    return path


def write_events(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def plot_accuracy(frame: pd.DataFrame, path: Path) -> Path:
    """Accuracy per window, one line per mode."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4))
    for mode, group in frame.groupby("mode", sort=False):
        ax.plot(group["window_id"], group["accuracy"], marker="o", label=mode)
    ax.set_xlabel("window")
    ax.set_ylabel("accuracy vs ground truth")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path
