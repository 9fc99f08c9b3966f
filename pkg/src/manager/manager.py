"""
Training manager: bootstraps the first detector, watches its rolling
accuracy against auto-labels, retrains on drift or on schedule, registers
every model and tells the detection service to swap.
"""
import logging
import threading
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..detector.mlp import ModelMetadata, TrainConfig, train
from ..detector.windows import FeatureWindow, build_windows
from ..errors import InsufficientData, NotEnoughData, NotifyTimeout, SingleClassData
from ..store.timeseries import TimeSeriesStore
from ..telemetry.types import EventKind, LabeledSample, LoopEvent, Prediction
from .monitor import AccuracyMonitor, DriftMonitorConfig, RetrainDecision, RetrainReason, check_drift
from .notifier import ModelUpdateNotifier
from .registry import ModelRegistry

logger = logging.getLogger(__name__)


class FeedbackJoiner:
    """Matches predictions with the auto-labels that arrive later for the same ts."""

    def __init__(self, max_pending: int = 10_000):
        self.max_pending = max_pending
        self._pending: Dict[int, Prediction] = {}
        self._lock = threading.Lock()

    def add_prediction(self, prediction: Prediction):
        with self._lock:
            self._pending[prediction.timestamp_ms] = prediction
            if len(self._pending) > self.max_pending:
                oldest = min(self._pending)
                del self._pending[oldest]

    def match(self, labeled: Sequence[LabeledSample]) -> List[Tuple[Prediction, LabeledSample]]:
        """Pairs for every labeled sample that has a pending prediction; Holds are consumed unmatched."""
        pairs = []
        with self._lock:
            for ls in labeled:
                prediction = self._pending.pop(ls.timestamp_ms, None)
                if prediction is not None and not ls.is_hold:
                    pairs.append((prediction, ls))
            if labeled:
                horizon = labeled[-1].timestamp_ms
                for ts in [t for t in self._pending if t < horizon]:
                    del self._pending[ts]
        return pairs


class TrainingManager:
    """
    Closed-loop model lifecycle.

    Time is taken from the data: the manager's clock is the newest timestamp it
    has seen, so accelerated and real-time runs make the same decisions.
    """

    def __init__(
        self,
        store: TimeSeriesStore,
        registry: ModelRegistry,
        notifier: Optional[ModelUpdateNotifier] = None,
        drift_cfg: Optional[DriftMonitorConfig] = None,
        train_cfg: Optional[TrainConfig] = None,
        sample_period_ms: int = 100,
        gap_factor: int = 5,
    ):
        """
        Initialize the manager.

        Args:
            store: Store holding the labeled series
            registry: Model registry shared with the detection service
            notifier: Model-update client; None registers without notifying
            drift_cfg: Drift and retrain policy
            train_cfg: Detector training configuration
            sample_period_ms: Nominal KPI sample period
            gap_factor: Windows never span a gap above gap_factor sample periods
        """
        self.store = store
        self.registry = registry
        self.notifier = notifier
        self.drift_cfg = drift_cfg or DriftMonitorConfig()
        self.train_cfg = train_cfg or TrainConfig()
        self.sample_period_ms = sample_period_ms
        self.max_gap_ms = gap_factor * sample_period_ms

        self.monitor = AccuracyMonitor(self.drift_cfg.eval_window)
        self.joiner = FeedbackJoiner()
        self.events: List[LoopEvent] = []

        self._state_lock = threading.Lock()
        self._job_lock = threading.Lock()
        self._queued: Optional[RetrainReason] = None
        self._now_ms = 0
        self._labels_seen = 0
        self._bootstrap_attempt_at = 0
        self.serving_version: Optional[int] = None
        self.pending_version: Optional[int] = None
        self.serving_train_range: Optional[Tuple[int, int]] = None
        self.pending_train_range: Optional[Tuple[int, int]] = None
        self.last_retrain_ms: Optional[int] = None
        self._resume()

    def _resume(self):
        latest = self.registry.latest_version()
        if latest is None:
            return
        meta = self.registry.meta(latest).get("metadata", {})
        self.serving_version = latest
        train_range = meta.get("train_range")
        self.serving_train_range = tuple(train_range) if train_range else None
        self.last_retrain_ms = meta.get("trained_at")
        logger.info(f"Resuming from registry: serving v{latest}")

    # Clock and events

    @property
    def now_ms(self) -> int:
        return self._now_ms

    def observe(self, ts: int):
        with self._state_lock:
            self._now_ms = max(self._now_ms, int(ts))

    def _emit(self, kind: EventKind, version: Optional[int], detail: str = ""):
        event = LoopEvent(timestamp_ms=self._now_ms, kind=kind, model_version=version, detail=detail)
        self.events.append(event)
        self.store.append_event(event)
        logger.info(f"{kind.value} v{version} {detail}".rstrip())

    # Inference feedback

    def record_inference(self, ts: int, predicted: int, auto_label: int) -> float:
        """
        Push one prediction/auto-label comparison.

        Returns:
            Rolling accuracy over the last eval_window comparisons
        """
        self.observe(ts)
        return self.monitor.record(predicted, auto_label)

    def add_prediction(self, prediction: Prediction):
        self.joiner.add_prediction(prediction)

    def process_labels(self, labeled: Sequence[LabeledSample]) -> Optional[int]:
        """
        Ingest newly stored labels: score waiting predictions, then bootstrap
        or check for drift.

        Returns:
            Version newly swapped in, if any
        """
        if not labeled:
            return None
        self._labels_seen += sum(1 for ls in labeled if not ls.is_hold)
        pairs = self.joiner.match(labeled)

        if self.serving_version is None and self.pending_version is None:
            self.observe(labeled[-1].timestamp_ms)
            return self._try_bootstrap()
        if self.pending_version is not None:
            self.observe(labeled[-1].timestamp_ms)
            return self._retry_pending()

        # the clock follows each scored sample, so a dip is acted on where it happens
        swapped = None
        for prediction, ls in pairs:
            if prediction.model_version != self.serving_version:
                continue
            self.record_inference(ls.timestamp_ms, prediction.label, int(ls.label))
            swapped = self._retrain_if_due() or swapped
        self.observe(labeled[-1].timestamp_ms)
        return self._retrain_if_due() or swapped

    def _retrain_if_due(self) -> Optional[int]:
        if self.pending_version is not None:
            return None
        decision = self.check_drift()
        if decision is None:
            return None
        try:
            return self.run_retrain(decision.reason)
        except (NotEnoughData, SingleClassData) as e:
            logger.warning(f"Skipping {decision.reason.value} retrain: {e}")
            self.last_retrain_ms = self._now_ms
        except NotifyTimeout as e:
            logger.warning(str(e))
        return None

    # Decisions

    def check_drift(self) -> Optional[RetrainDecision]:
        """Evaluate the retrain policy at the current logical time."""
        if self.serving_version is None:
            return None
        last_s = (self.last_retrain_ms or 0) / 1000.0
        decision = check_drift(
            self.drift_cfg,
            self.monitor.accuracy,
            self._now_ms / 1000.0,
            last_s,
            window_full=self.monitor.full,
        )
        if decision is not None and decision.reason == RetrainReason.DRIFT:
            self._emit(EventKind.DRIFT_DETECTED, self.serving_version, f"accuracy={decision.accuracy:.3f}")
        elif decision is not None:
            self._emit(EventKind.PERIODIC_RETRAIN, self.serving_version)
        return decision

    def _try_bootstrap(self) -> Optional[int]:
        if self._labels_seen < self.drift_cfg.min_bootstrap_samples:
            return None
        # at most one attempt per logical sample period
        if self._now_ms < self._bootstrap_attempt_at:
            return None
        self._bootstrap_attempt_at = self._now_ms + self.sample_period_ms
        try:
            return self.bootstrap()
        except (NotEnoughData, SingleClassData) as e:
            logger.info(f"Bootstrap deferred: {e}")
        except NotifyTimeout as e:
            logger.warning(str(e))
        return None

    def _retry_pending(self) -> Optional[int]:
        if (self._now_ms - (self.last_retrain_ms or 0)) / 1000.0 < self.drift_cfg.cooldown_s:
            return None
        version = self.pending_version
        try:
            return self._deploy(version)
        except NotifyTimeout as e:
            self.last_retrain_ms = self._now_ms
            logger.warning(str(e))
        return None

    # Training

    def _labeled_since(self, t0: int) -> List[LabeledSample]:
        return self.store.query_labeled(t0, self._now_ms + 1)

    def bootstrap(self) -> int:
        """
        Train and deploy the first model on all stored labels.

        Raises:
            NotEnoughData: fewer than min_bootstrap_samples non-Hold labels
            SingleClassData: labels cover one class only
        """
        labeled = self._labeled_since(0)
        usable = sum(1 for ls in labeled if not ls.is_hold)
        if usable < self.drift_cfg.min_bootstrap_samples:
            raise NotEnoughData(f"{usable} labels, need {self.drift_cfg.min_bootstrap_samples}")
        windows = self._windows(labeled)
        return self._train_and_deploy(windows, labeled, RetrainReason.BOOTSTRAP)

    def run_retrain(self, reason: RetrainReason) -> Optional[int]:
        """
        Retrain on fresh labels padded with older ones, register, and deploy.

        A request made while a job runs is queued; concurrent requests
        coalesce into one follow-up job.

        Returns:
            The deployed version, or None when the request was queued

        Raises:
            NotEnoughData: no labels since the serving model's training range
            NotifyTimeout: the service did not ack; the version stays pending
        """
        if not self._job_lock.acquire(blocking=False):
            with self._state_lock:
                self._queued = reason
            logger.info(f"Retrain in progress; queued {reason.value} request")
            return None
        try:
            version = self._retrain_once(reason)
            while True:
                with self._state_lock:
                    queued, self._queued = self._queued, None
                if queued is None:
                    break
                version = self._retrain_once(queued)
            return version
        finally:
            self._job_lock.release()

    def _retrain_once(self, reason: RetrainReason) -> int:
        self._emit(EventKind.RETRAIN_STARTED, self.serving_version, reason.value)
        since = (self.serving_train_range[1] + 1) if self.serving_train_range else 0
        fresh = [ls for ls in self._labeled_since(since) if not ls.is_hold]
        if not fresh:
            raise NotEnoughData(f"no labels since ts {since}")

        horizon_ms = int(2 * self.drift_cfg.periodic_interval_s * 1000)
        labeled = self._labeled_since(max(0, self._now_ms - horizon_ms))
        core, older = self._split_core(labeled)
        windows = self._windows(core)
        pad = self._pad_windows(older, len(windows))
        return self._train_and_deploy(windows + pad, core, reason)

    def _split_core(self, labeled: List[LabeledSample]) -> Tuple[List[LabeledSample], List[LabeledSample]]:
        """Most recent min_bootstrap_samples non-Hold labels, and everything before them."""
        needed = self.drift_cfg.min_bootstrap_samples
        count = 0
        for i in range(len(labeled) - 1, -1, -1):
            if not labeled[i].is_hold:
                count += 1
                if count == needed:
                    return labeled[i:], labeled[:i]
        if count == 0:
            raise NotEnoughData("no non-Hold labels in the retrain horizon")
        return labeled, []

    def _windows(self, labeled: Sequence[LabeledSample]) -> List[FeatureWindow]:
        try:
            return build_windows(labeled, max_gap_ms=self.max_gap_ms)
        except InsufficientData as e:
            raise NotEnoughData(str(e)) from e

    def _pad_windows(self, older: Sequence[LabeledSample], n_core: int) -> List[FeatureWindow]:
        want = int(round(self.drift_cfg.pad_fraction * n_core))
        if want == 0 or len(older) < 15:
            return []
        try:
            candidates = build_windows(older, max_gap_ms=self.max_gap_ms)
        except InsufficientData:
            return []
        rng = np.random.default_rng(self.train_cfg.seed + len(self.events))
        if len(candidates) <= want:
            return list(candidates)
        picks = np.sort(rng.choice(len(candidates), size=want, replace=False))
        return [candidates[i] for i in picks]

    def _train_and_deploy(
        self,
        windows: List[FeatureWindow],
        labeled: Sequence[LabeledSample],
        reason: RetrainReason,
    ) -> int:
        train_range = (labeled[0].timestamp_ms, labeled[-1].timestamp_ms)
        metadata = ModelMetadata(
            parent_version=self.serving_version,
            trained_at=self._now_ms,
            train_range=train_range,
            reason=reason.value,
        )
        cfg = self.train_cfg.model_copy(update={"seed": self.train_cfg.seed + len(self.registry.versions())})
        try:
            model = train(windows, cfg, metadata)
        except InsufficientData as e:
            raise NotEnoughData(str(e)) from e

        version = self.registry.register(model)
        with self._state_lock:
            self.pending_version = version
            self.pending_train_range = train_range
            self.last_retrain_ms = self._now_ms
        self._emit(EventKind.RETRAIN_COMPLETED, version,
                   f"reason={reason.value} windows={len(windows)} acc={model.metadata.eval_accuracy:.3f}")
        return self._deploy(version)

    def _deploy(self, version: int) -> int:
        """Notify the service outside any lock; swap bookkeeping happens on ack."""
        if self.notifier is not None:
            ack = self.notifier.notify(version)
            if not ack.ack:
                raise NotifyTimeout(version, ack.error)
        with self._state_lock:
            old = self.serving_version
            self.serving_version = version
            self.serving_train_range = self.pending_train_range or self.serving_train_range
            self.pending_version = None
        self.monitor.reset()
        self._emit(EventKind.MODEL_SWAPPED, version, f"old={old}")
        return version

    @property
    def swap_count(self) -> int:
        return sum(1 for e in self.events if e.kind == EventKind.MODEL_SWAPPED)
