"""Synthetic uplink KPI source with scripted jammer and noise phases"""
from .config import SimConfig
from .scenarios import (
    TABLE1_ROWS,
    evaluation_schedule,
    named_schedule,
    table1_pair_schedule,
    table1_phase,
)
from .simulator import RanSimulator, generate_stream, run_table1_suite

__all__ = [
    "SimConfig",
    "TABLE1_ROWS",
    "evaluation_schedule",
    "named_schedule",
    "table1_pair_schedule",
    "table1_phase",
    "RanSimulator",
    "generate_stream",
    "run_table1_suite",
]
