"""Interference detection xApp: stream ingestion, inference and hot model swap"""
from .prediction_log import PredictionLog
from .service import DetectionService, StreamStats, SwapRecord
from .stream import StreamServer, send_samples

__all__ = [
    "PredictionLog",
    "DetectionService",
    "StreamStats",
    "SwapRecord",
    "StreamServer",
    "send_samples",
]
