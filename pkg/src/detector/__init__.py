"""Feature windows, MLP interference detector and model files"""
from .mlp import (
    MlpModel,
    ModelMetadata,
    TrainConfig,
    forward,
    gradient_check,
    init_model,
    train,
)
from .serialization import load_model, save_model
from .windows import FeatureWindow, build_windows, windows_to_arrays

__all__ = [
    "MlpModel",
    "ModelMetadata",
    "TrainConfig",
    "forward",
    "gradient_check",
    "init_model",
    "train",
    "load_model",
    "save_model",
    "FeatureWindow",
    "build_windows",
    "windows_to_arrays",
]
