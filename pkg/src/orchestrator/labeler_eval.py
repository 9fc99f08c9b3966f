"""
Offline labeler evaluation over the interference/noise table rows.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..labeler.labeler import LabelerConfig, run_labeler
from ..sim.config import SimConfig
from ..sim.scenarios import TABLE1_ROWS, table1_pair_schedule
from ..sim.simulator import generate_stream
from ..telemetry.types import Label, LabeledSample

logger = logging.getLogger(__name__)

TRANSITION_MARGIN = 30
EVAL_COLUMNS = [
    "row", "interference_event", "interference_db", "noise_amplitude",
    "agreement", "agreement_excl_transitions", "coverage", "n_samples",
]


def transition_mask(n: int, boundaries: Sequence[int], margin: int = TRANSITION_MARGIN) -> np.ndarray:
    """True for samples farther than `margin` from every internal phase boundary."""
    keep = np.ones(n, dtype=bool)
    for b in boundaries:
        keep[max(0, b - margin):min(n, b + margin)] = False
    return keep


def label_agreement(labeled: Sequence[LabeledSample], truth: Sequence[Label], keep: Optional[np.ndarray] = None):
    """
    Agreement of non-Hold labels with ground truth, and label coverage.

    Returns:
        (agreement, coverage); agreement is NaN when nothing was labeled
    """
    n = len(labeled)
    keep = np.ones(n, dtype=bool) if keep is None else keep[:n]
    labels = np.asarray([-1 if ls.label is None else int(ls.label) for ls in labeled])
    gt = np.asarray([int(t) for t in truth[:n]])
    labeled_mask = (labels >= 0) & keep
    coverage = float(labeled_mask.sum() / max(keep.sum(), 1))
    if not labeled_mask.any():
        return float("nan"), coverage
    return float(np.mean(labels[labeled_mask] == gt[labeled_mask])), coverage


def run_table1_labeler_eval(
    sim_cfg: Optional[SimConfig] = None,
    labeler_cfg: Optional[LabelerConfig] = None,
    phase_s: float = 30.0,
    cycles: int = 2,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Label every table row offline and compare with ground truth.

    Each ON row is streamed with its OFF partner as alternating phases, so
    both rows are labeled once the first model exists.

    Returns:
        One row per table row with agreement, transition-excluded agreement
        and coverage
    """
    labeler_cfg = labeler_cfg or LabelerConfig()
    results: List[dict] = []
    on_rows = [row for row, (event, _, _) in sorted(TABLE1_ROWS.items()) if event]
    for on_row in tqdm(on_rows, disable=not progress, desc="table rows"):
        schedule = table1_pair_schedule(on_row, phase_s=phase_s, cycles=cycles)
        stream = generate_stream(schedule, sim_cfg)
        samples = [s for s, _ in stream]
        truth = [t for _, t in stream]
        labeled = run_labeler(samples, labeler_cfg)

        n = len(labeled)
        starts = np.cumsum([0] + [schedule.samples_in(p) for p in schedule.phases])
        keep_transitions = transition_mask(n, starts[1:-1])
        phase_of = np.searchsorted(starts, np.arange(n), side="right") - 1

        for row, on in ((on_row, True), (on_row + 1, False)):
            event, power, amp = TABLE1_ROWS[row]
            in_row = np.asarray([schedule.phases[i].interference_event == on for i in phase_of])
            agreement, coverage = label_agreement(labeled, truth, in_row)
            excluded, _ = label_agreement(labeled, truth, in_row & keep_transitions)
            results.append({
                "row": row,
                "interference_event": event,
                "interference_db": power,
                "noise_amplitude": amp,
                "agreement": agreement,
                "agreement_excl_transitions": excluded,
                "coverage": coverage,
                "n_samples": int(in_row.sum()),
            })

    frame = pd.DataFrame(results, columns=EVAL_COLUMNS).sort_values("row").reset_index(drop=True)
    logger.info(f"Labeler evaluation over {len(frame)} rows, mean agreement {frame['agreement'].mean():.3f}")
    return frame
