"""
Detection service: sliding-window inference over the KPI stream with
hot-swappable models.
"""
import logging
import threading
from collections import deque
from dataclasses import asdict, dataclass
from typing import Deque, List, Optional, Tuple, Union

import numpy as np

from ..api.models import ModelUpdateAck, StatusResponse
from ..detector.mlp import MlpModel
from ..detector.windows import WINDOW_STEPS
from ..errors import DecodeError, FormatError, RangeError
from ..manager.registry import ModelRegistry, parse_registry_uri
from ..telemetry.types import KpiSample, Prediction, validate_sample
from ..telemetry.wire import decode_sample
from .prediction_log import PredictionLog

logger = logging.getLogger(__name__)


@dataclass
class StreamStats:
    received: int = 0
    inferred: int = 0
    dropped: int = 0
    gaps: int = 0
    decode_errors: int = 0
    swaps: int = 0


@dataclass(frozen=True)
class SwapRecord:
    timestamp_ms: Optional[int]
    old_version: Optional[int]
    new_version: int


class DetectionService:
    """
    Consumes KPI samples one at a time and predicts once 15 contiguous samples
    are buffered.

    The active (version, model) pair is read once per inference and replaced
    as a whole on swap, so every prediction comes from exactly one version.
    """

    def __init__(
        self,
        registry: ModelRegistry,
        prediction_log: Optional[PredictionLog] = None,
        sample_period_ms: int = 100,
        gap_factor: int = 5,
        window_steps: int = WINDOW_STEPS,
    ):
        """
        Initialize the service.

        Args:
            registry: Registry models are fetched from
            prediction_log: Where predictions are written
            sample_period_ms: Nominal KPI sample period
            gap_factor: A timestamp jump above gap_factor periods resets the window
            window_steps: Samples per inference window
        """
        self.registry = registry
        self.prediction_log = prediction_log or PredictionLog(asynchronous=False)
        self.sample_period_ms = sample_period_ms
        self.max_gap_ms = gap_factor * sample_period_ms
        self.window_steps = window_steps

        self.stats = StreamStats()
        self.swap_log: List[SwapRecord] = []
        self._buffer: Deque[KpiSample] = deque(maxlen=window_steps)
        self._active: Optional[Tuple[int, MlpModel]] = None
        self._swap_lock = threading.Lock()
        self._last_ts: Optional[int] = None

    @property
    def model_version(self) -> Optional[int]:
        active = self._active
        return active[0] if active else None

    @property
    def buffered(self) -> int:
        return len(self._buffer)

    def load_latest(self) -> Optional[int]:
        """Serve the registry's LATEST version, if there is one."""
        latest = self.registry.latest_version()
        if latest is not None:
            self.handle_model_update(latest, f"registry://v{latest}")
        return latest

    def reset_buffer(self, reason: str = "reset"):
        self._buffer.clear()
        logger.info(f"Window buffer reset ({reason})")

    def ingest_line(self, line: Union[bytes, str]) -> Optional[Prediction]:
        """Decode one wire record and ingest it; malformed records are counted and skipped."""
        try:
            sample = decode_sample(line)
        except (DecodeError, RangeError) as e:
            self.stats.decode_errors += 1
            logger.warning(f"Dropping malformed record ({self.stats.decode_errors} so far): {e}")
            return None
        return self.ingest(sample)

    def ingest(self, sample: KpiSample) -> Optional[Prediction]:
        """
        Buffer one sample and predict when the window is full.

        Args:
            sample: Validated KPI sample

        Returns:
            Prediction for the window ending at this sample, or None while the
            window fills or no model is deployed
        """
        validate_sample(sample)
        self.stats.received += 1
        ts = sample.timestamp_ms
        if self._last_ts is not None and (ts - self._last_ts > self.max_gap_ms or ts <= self._last_ts):
            self.stats.gaps += 1
            self.reset_buffer(f"gap {self._last_ts} -> {ts}")
        self._last_ts = ts
        self._buffer.append(sample)

        if len(self._buffer) < self.window_steps:
            return None
        with self._swap_lock:
            active = self._active
        if active is None:
            return None

        version, model = active
        window = np.asarray([s.features() for s in self._buffer], dtype=np.float64).ravel()
        p = model.predict_proba(window[np.newaxis, :])[0]
        prediction = Prediction(
            timestamp_ms=ts,
            label=int(np.argmax(p)),
            p_interference=float(p[1]),
            model_version=version,
        )
        self.stats.inferred += 1
        self.prediction_log.write(prediction)
        return prediction

    def handle_model_update(self, model_version: int, registry_uri: str) -> ModelUpdateAck:
        """
        Fetch a registered model and make it the active one.

        The model is loaded and validated before the swap; on failure the old
        model keeps serving.

        Raises:
            FetchError: version not in the registry
            FormatError: bad URI or corrupt model file
            VersionError: model file from a newer format
        """
        if parse_registry_uri(registry_uri) != model_version:
            raise FormatError(f"uri {registry_uri} does not name v{model_version}")
        current = self.model_version
        if current == model_version:
            return ModelUpdateAck(ack=True, old=current, new=current)

        model = self.registry.resolve(registry_uri)
        with self._swap_lock:
            old = self.model_version
            self._active = (model_version, model)
            self.swap_log.append(SwapRecord(self._last_ts, old, model_version))
            self.stats.swaps += 1
        logger.info(f"Swapped model v{old} -> v{model_version}")
        return ModelUpdateAck(ack=True, old=old, new=model_version)

    def status(self) -> StatusResponse:
        return StatusResponse(model_version=self.model_version, **asdict(self.stats))

    def shutdown(self):
        self.prediction_log.flush()
        self.prediction_log.close()
        logger.info(f"Detection service stopped: {self.stats}")
