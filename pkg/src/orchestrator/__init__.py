"""Closed-loop experiments, labeler evaluation and report artifacts"""
from .experiment import ExperimentMode, ExperimentReport, ExperimentSpec, run_experiment, run_paired
from .labeler_eval import run_table1_labeler_eval
from .loop import ClosedLoop, ScoredPrediction

__all__ = [
    "ExperimentMode",
    "ExperimentReport",
    "ExperimentSpec",
    "run_experiment",
    "run_paired",
    "run_table1_labeler_eval",
    "ClosedLoop",
    "ScoredPrediction",
]
