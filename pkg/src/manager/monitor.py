"""
Rolling detection accuracy against auto-labels, and the retrain decision.
"""
import logging
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from ..errors import ConfigError

logger = logging.getLogger(__name__)


class DriftMonitorConfig(BaseModel):
    """When the training manager retrains."""
    eval_window: int = Field(100, ge=1, description="Predictions in the rolling accuracy")
    drift_threshold: float = Field(0.70, description="Rolling accuracy below which drift is declared")
    cooldown_s: float = Field(60.0, description="Minimum time between a retrain and a drift retrain")
    periodic_interval_s: float = Field(600.0, gt=0, description="Time between periodic retrains")
    min_bootstrap_samples: int = Field(900, ge=1, description="Non-Hold labels needed to train")
    pad_fraction: float = Field(0.5, ge=0, description="Older-data pad as a fraction of fresh windows")
    enabled: bool = Field(True, description="False freezes the model after bootstrap")

    @model_validator(mode="after")
    def _check_ranges(self) -> "DriftMonitorConfig":
        if not 0.0 < self.drift_threshold < 1.0:
            raise ConfigError(f"drift_threshold must be in (0, 1), got {self.drift_threshold}")
        if self.cooldown_s <= 0:
            raise ConfigError(f"cooldown_s must be positive, got {self.cooldown_s}")
        return self


class RetrainReason(str, Enum):
    BOOTSTRAP = "bootstrap"
    DRIFT = "drift"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class RetrainDecision:
    reason: RetrainReason
    accuracy: Optional[float] = None


class AccuracyMonitor:
    """Ring buffer of prediction/auto-label agreements."""

    def __init__(self, size: int = 100):
        self.size = size
        self._hits = deque(maxlen=size)
        self._lock = threading.Lock()

    def record(self, predicted: int, auto_label: int) -> float:
        """Push one comparison and return the rolling accuracy."""
        with self._lock:
            self._hits.append(int(predicted) == int(auto_label))
            return sum(self._hits) / len(self._hits)

    @property
    def accuracy(self) -> Optional[float]:
        with self._lock:
            if not self._hits:
                return None
            return sum(self._hits) / len(self._hits)

    @property
    def count(self) -> int:
        return len(self._hits)

    @property
    def full(self) -> bool:
        return len(self._hits) >= self.size

    def reset(self):
        with self._lock:
            self._hits.clear()


def check_drift(
    cfg: DriftMonitorConfig,
    accuracy: Optional[float],
    now_s: float,
    last_retrain_s: float,
    window_full: bool = True,
) -> Optional[RetrainDecision]:
    """
    Decide whether to retrain.

    Drift wins over periodic when both apply; drift needs a full window and an
    elapsed cooldown.

    Args:
        cfg: Monitor configuration
        accuracy: Current rolling accuracy, None when nothing was recorded
        now_s: Current logical time
        last_retrain_s: Time of the last completed retrain
        window_full: Whether the accuracy ring holds eval_window entries

    Returns:
        RetrainDecision or None
    """
    if not cfg.enabled:
        return None
    elapsed = now_s - last_retrain_s
    if (window_full and accuracy is not None and accuracy < cfg.drift_threshold
            and elapsed >= cfg.cooldown_s):
        return RetrainDecision(RetrainReason.DRIFT, accuracy)
    if elapsed >= cfg.periodic_interval_s:
        return RetrainDecision(RetrainReason.PERIODIC, accuracy)
    return None
