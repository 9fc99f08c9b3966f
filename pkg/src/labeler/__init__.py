"""Signal preparation and unsupervised GMM auto-labeling of uplink SNR"""
from .gmm import Gmm1d, em_fit, gmm_predict, gmm_predict_many, log_likelihood
from .labeler import (
    GmmLabeler,
    LabelerConfig,
    LabelerState,
    LabelModel,
    fit_label_model,
    label_batch,
    run_labeler,
    should_retrain,
)
from .prep import Batch, SmoothingConfig, arc, moving_average, standard_scale

__all__ = [
    "Gmm1d",
    "em_fit",
    "gmm_predict",
    "gmm_predict_many",
    "log_likelihood",
    "GmmLabeler",
    "LabelerConfig",
    "LabelerState",
    "LabelModel",
    "fit_label_model",
    "label_batch",
    "run_labeler",
    "should_retrain",
    "Batch",
    "SmoothingConfig",
    "arc",
    "moving_average",
    "standard_scale",
]
