"""
Deterministic uplink KPI generator driven by a scenario schedule.
"""
import logging
from collections import deque
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ..telemetry.types import KpiSample, Label, ScenarioPhase, ScenarioSchedule
from .config import SimConfig
from .scenarios import TABLE1_ROWS, table1_phase

logger = logging.getLogger(__name__)

StreamItem = Tuple[KpiSample, Label]


class RanSimulator:
    """
    Stand-in for the RAN + jammer testbed.

    One simulator instance produces one stream; noise is drawn from a single
    generator seeded with cfg.seed, so equal inputs give identical streams.
    """

    def __init__(self, cfg: Optional[SimConfig] = None):
        """
        Initialize the simulator.

        Args:
            cfg: Simulator configuration
        """
        self.cfg = cfg or SimConfig()
        self._mcs_thresholds = np.asarray(self.cfg.mcs_table, dtype=np.float64)
        self._clean_bler = self.bler_for(self.cfg.link_margin_db)

    def degradation(self, phase: ScenarioPhase) -> float:
        """SNR loss in dB caused by the phase's jammer."""
        if not phase.interference_event:
            return 0.0
        cfg = self.cfg
        loss = cfg.interference_coupling * 10.0 ** (
            (phase.interference_db - cfg.interference_ref_db) / cfg.interference_slope_db
        )
        return float(np.clip(loss, 0.0, cfg.clean_point_snr_db))

    def noise_sigma(self, phase: ScenarioPhase) -> float:
        return self.cfg.noise_amp_to_sigma * phase.noise_amplitude

    def mcs_for(self, smoothed_snr: float) -> int:
        """Highest MCS whose threshold plus backoff fits under the smoothed SNR."""
        usable = self._mcs_thresholds + self.cfg.mcs_backoff_db
        idx = int(np.searchsorted(usable, smoothed_snr, side="right")) - 1
        return int(np.clip(idx, 0, len(usable) - 1))

    def bler_for(self, margin_db: float) -> float:
        z = np.clip((margin_db - self.cfg.bler_midpoint_db) / self.cfg.bler_slope_db, -500.0, 500.0)
        return float(1.0 / (1.0 + np.exp(z)))

    def bitrate_for(self, mcs: int, bler: float) -> float:
        cfg = self.cfg
        rate = cfg.reference_bitrate_mbps * (mcs / cfg.reference_mcs)
        return float(max(0.0, rate * (1.0 - bler) / (1.0 - self._clean_bler)))

    def stream(self, schedule: ScenarioSchedule, start_ms: int = 0) -> Iterator[StreamItem]:
        """
        Generate (sample, ground truth) pairs for every phase in order.

        Args:
            schedule: Phases to play
            start_ms: Timestamp of the first sample

        Yields:
            KPI sample and its ground-truth label
        """
        cfg = self.cfg
        rng = np.random.default_rng(cfg.seed)
        recent = deque(maxlen=cfg.link_smoothing)
        clean = cfg.clean_point_snr_db
        ts = start_ms

        for phase in schedule.phases:
            loss = self.degradation(phase)
            sigma = self.noise_sigma(phase)
            truth = Label.INTERFERENCE if phase.interference_event else Label.NO_INTERFERENCE
            penalty = cfg.interference_bler_penalty * loss

            for _ in range(schedule.samples_in(phase)):
                snr = clean - loss + (rng.normal(0.0, sigma) if sigma > 0 else 0.0)
                recent.append(snr)
                smoothed = float(np.mean(recent))
                mcs = self.mcs_for(smoothed)
                margin = snr - (smoothed - cfg.link_margin_db) - penalty
                bler = self.bler_for(margin)
                sample = KpiSample(
                    timestamp_ms=int(ts),
                    ul_snr=float(snr),
                    ul_mcs=mcs,
                    ul_bitrate=self.bitrate_for(mcs, bler),
                    ul_bler=bler,
                )
                yield sample, truth
                ts += schedule.sample_period_ms


def generate_stream(
    schedule: ScenarioSchedule,
    cfg: Optional[SimConfig] = None,
    start_ms: int = 0,
) -> List[StreamItem]:
    """
    Materialize a whole stream.

    Args:
        schedule: Phases to play
        cfg: Simulator configuration
        start_ms: Timestamp of the first sample

    Returns:
        List of (sample, ground truth) pairs
    """
    items = list(RanSimulator(cfg).stream(schedule, start_ms=start_ms))
    logger.debug(f"Generated {len(items)} samples over {len(schedule.phases)} phases")
    return items


def run_table1_suite(
    cfg: Optional[SimConfig] = None,
    duration_s: float = 100.0,
    sample_period_ms: int = 100,
) -> List[Tuple[int, ScenarioPhase, List[StreamItem]]]:
    """
    One single-phase stream per interference/noise table row.

    Returns:
        (row number, phase, stream) for rows 1..18
    """
    suite = []
    for row in sorted(TABLE1_ROWS):
        phase = table1_phase(row, duration_s)
        schedule = ScenarioSchedule(phases=[phase], sample_period_ms=sample_period_ms)
        suite.append((row, phase, generate_stream(schedule, cfg)))
    return suite
