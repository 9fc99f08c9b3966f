"""
Shared fixtures for the jamsense tests.
"""
import sys
from pathlib import Path

# Add parent directory to path so `src` is importable
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import pytest

from src.detector.mlp import TrainConfig, train
from src.detector.windows import build_windows
from src.manager.registry import ModelRegistry
from src.sim.config import SimConfig
from src.sim.simulator import generate_stream
from src.store.timeseries import FileTimeSeriesStore, MemoryTimeSeriesStore
from src.telemetry.types import (
    KpiSample,
    Label,
    LabeledSample,
    LabelSource,
    ScenarioPhase,
    ScenarioSchedule,
)


def make_sample(ts: int, snr: float = 25.0, mcs: int = 24, bitrate: float = 20.0,
                bler: float = 0.01) -> KpiSample:
    return KpiSample(timestamp_ms=ts, ul_snr=snr, ul_mcs=mcs, ul_bitrate=bitrate, ul_bler=bler)


def truth_labeled(items, batch_id: int = 0):
    """Wrap simulator output as labeled samples carrying the ground truth."""
    return [
        LabeledSample(sample=s, label=Label(truth), source=LabelSource.GROUND_TRUTH_SIM, batch_id=batch_id)
        for s, truth in items
    ]


def on_off_stream(phase_s: float = 100.0, seed: int = 0, jammer_db: float = -8.0,
                  noise: float = 0.056, cycles: int = 1, start_ms: int = 0):
    """ON then OFF, repeated; returns (sample, truth) pairs."""
    phases = []
    for _ in range(cycles):
        phases.append(ScenarioPhase.on(jammer_db, noise, phase_s))
        phases.append(ScenarioPhase.off(noise, phase_s))
    return generate_stream(ScenarioSchedule(phases=phases), SimConfig(seed=seed), start_ms=start_ms)


@pytest.fixture
def sample_factory():
    return make_sample


@pytest.fixture
def memory_store():
    return MemoryTimeSeriesStore()


@pytest.fixture
def file_store(tmp_path):
    store = FileTimeSeriesStore(tmp_path / "store")
    yield store
    store.close()


@pytest.fixture
def registry(tmp_path):
    return ModelRegistry(tmp_path / "registry")


@pytest.fixture(scope="session")
def fast_train_config():
    return TrainConfig(epochs=10, seed=0)


@pytest.fixture(scope="session")
def trained_model(fast_train_config):
    """Detector trained on a clean ON/OFF pair at -8 dB."""
    labeled = truth_labeled(on_off_stream(phase_s=60.0, seed=1))
    return train(build_windows(labeled), fast_train_config)
