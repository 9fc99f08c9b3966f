"""
In-process closed loop: simulator -> store -> detection service -> labeler ->
training manager -> model update over the control API.
"""
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from fastapi.testclient import TestClient
from tqdm import tqdm

from ..api.app import create_app
from ..config import Settings
from ..labeler.labeler import GmmLabeler
from ..manager.manager import TrainingManager
from ..manager.notifier import ModelUpdateNotifier
from ..manager.registry import ModelRegistry
from ..store.timeseries import GROUND_TRUTH, FileTimeSeriesStore
from ..telemetry.types import KpiSample, Label, LabeledSample
from ..xapp.prediction_log import PredictionLog
from ..xapp.service import DetectionService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredPrediction:
    """A prediction next to the simulator's ground truth for the same sample."""
    sample_index: int
    timestamp_ms: int
    predicted: int
    truth: int
    model_version: int


class ClosedLoop:
    """
    All components wired together in one process on a logical clock.

    Components talk through their declared interfaces: samples and labels go
    through the store, model updates through the control API.
    """

    def __init__(self, workdir: Path, settings: Settings, adaptive: bool = True):
        """
        Initialize the loop.

        Args:
            workdir: Directory for the store and the registry
            settings: Component settings
            adaptive: False freezes the model after bootstrap
        """
        self.workdir = Path(workdir)
        self.settings = settings
        period = settings.service.sample_period_ms

        self.store = FileTimeSeriesStore(
            self.workdir / "store",
            fsync=settings.store.fsync,
            checkpoint_every=settings.store.checkpoint_every,
        )
        self.registry = ModelRegistry(self.workdir / "registry")
        self.service = DetectionService(
            self.registry,
            prediction_log=PredictionLog(self.store, asynchronous=False),
            sample_period_ms=period,
            gap_factor=settings.service.gap_factor,
        )
        self.client = TestClient(create_app(self.service))
        drift_cfg = settings.drift.model_copy(update={"enabled": settings.drift.enabled and adaptive})
        self.manager = TrainingManager(
            self.store,
            self.registry,
            notifier=ModelUpdateNotifier(cfg=settings.notify, client=self.client),
            drift_cfg=drift_cfg,
            train_cfg=settings.train,
            sample_period_ms=period,
            gap_factor=settings.service.gap_factor,
        )
        self.service.prediction_log.add_sink(self.manager.add_prediction)
        self.labeler = GmmLabeler(settings.labeler)
        self.scored: List[ScoredPrediction] = []
        self.samples_run = 0

    def _label(self, labeled: List[LabeledSample]):
        for ls in labeled:
            self.store.append_labeled(ls)
        self.manager.process_labels(labeled)

    def step(self, sample: KpiSample, truth: Label):
        """Advance the loop by one sample."""
        index = self.samples_run
        self.store.append_sample(sample)
        self.store.append(GROUND_TRUTH, {"ts": sample.timestamp_ms, "label": int(truth)})

        prediction = self.service.ingest(sample)
        if prediction is not None:
            self.scored.append(ScoredPrediction(
                sample_index=index,
                timestamp_ms=prediction.timestamp_ms,
                predicted=prediction.label,
                truth=int(truth),
                model_version=prediction.model_version,
            ))
        self._label(self.labeler.push([sample]))
        self.samples_run += 1

    def run(
        self,
        items: Iterable[Tuple[KpiSample, Label]],
        total: Optional[int] = None,
        realtime: bool = False,
        progress: bool = False,
    ) -> List[ScoredPrediction]:
        """
        Play a stream through the loop.

        Args:
            items: (sample, ground truth) pairs
            total: Stream length for the progress bar
            realtime: Pace samples at the sample period instead of as fast as possible
            progress: Show a progress bar

        Returns:
            Scored predictions in stream order
        """
        period_s = self.settings.service.sample_period_ms / 1000.0
        for sample, truth in tqdm(items, total=total, disable=not progress, desc="closed loop"):
            started = time.monotonic()
            self.step(sample, truth)
            if realtime:
                time.sleep(max(0.0, period_s - (time.monotonic() - started)))
        self._label(self.labeler.flush())
        return self.scored

    def close(self):
        self.service.shutdown()
        self.client.close()
        self.store.close()
