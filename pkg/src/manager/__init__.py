"""Training manager: drift monitoring, retraining, model registry and notification"""
from .manager import FeedbackJoiner, TrainingManager
from .monitor import AccuracyMonitor, DriftMonitorConfig, RetrainDecision, RetrainReason, check_drift
from .notifier import ModelUpdateNotifier, NotifyConfig
from .registry import ModelRegistry, parse_registry_uri, registry_uri

__all__ = [
    "FeedbackJoiner",
    "TrainingManager",
    "AccuracyMonitor",
    "DriftMonitorConfig",
    "RetrainDecision",
    "RetrainReason",
    "check_drift",
    "ModelUpdateNotifier",
    "NotifyConfig",
    "ModelRegistry",
    "parse_registry_uri",
    "registry_uri",
]
