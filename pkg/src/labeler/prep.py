"""
Signal preparation for the labeler: smoothing, per-batch scaling and the
average-rate-of-change trigger statistic.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..errors import DegenerateBatch, EmptyInput, TooShort

SCALE_EPSILON = 1e-9


class SmoothingConfig(BaseModel):
    """Uniform moving-average kernel."""
    window_w: int = Field(5, ge=1, description="Kernel width W (odd)")

    @field_validator("window_w")
    @classmethod
    def _odd(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("window_w must be odd for symmetric padding")
        return value


@dataclass(frozen=True)
class Batch:
    """A run of consecutive values cut from a stream, [start_idx, end_idx)."""
    values: np.ndarray
    start_idx: int
    end_idx: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.end_idx - self.start_idx != len(values):
            raise ValueError(
                f"Batch span {self.start_idx}..{self.end_idx} does not match {len(values)} values"
            )

    @classmethod
    def of(cls, values: Sequence[float], start_idx: int = 0) -> "Batch":
        return cls(np.asarray(values, dtype=np.float64), start_idx, start_idx + len(values))

    def __len__(self) -> int:
        return len(self.values)


def moving_average(series: Sequence[float], cfg: SmoothingConfig = SmoothingConfig()) -> np.ndarray:
    """
    Centered uniform moving average over an edge-padded series.

    Args:
        series: Values to smooth
        cfg: Kernel configuration

    Returns:
        Smoothed values, same length as the input
    """
    values = np.asarray(series, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("moving_average needs at least one value")
    half = cfg.window_w // 2
    padded = np.pad(values, half, mode="edge")
    kernel = np.full(cfg.window_w, 1.0 / cfg.window_w)
    return np.convolve(padded, kernel, mode="valid")


def scaling_params(values: np.ndarray) -> Tuple[float, float]:
    """Mean and population std of a batch, rejecting constant batches."""
    if len(values) < 2:
        raise TooShort(f"need at least 2 values, got {len(values)}")
    mean = float(np.mean(values))
    std = float(np.std(values))
    if std < SCALE_EPSILON:
        raise DegenerateBatch(f"batch std {std:.3g} below {SCALE_EPSILON}")
    return mean, std


def standard_scale(batch: Batch) -> Batch:
    """
    Scale a batch to zero mean and unit population std.

    Raises:
        DegenerateBatch: the batch is (numerically) constant
    """
    mean, std = scaling_params(batch.values)
    return Batch((batch.values - mean) / std, batch.start_idx, batch.end_idx)


def arc(batch: Batch) -> float:
    """
    Average rate of change: mean of successive differences.

    The sum telescopes, so it is evaluated as (last - first) / (N - 1).

    Args:
        batch: At least two values

    Returns:
        (1/(N-1)) * sum(values[i+1] - values[i])
    """
    n = len(batch.values)
    if n < 2:
        raise TooShort(f"arc needs at least 2 values, got {n}")
    return float((batch.values[-1] - batch.values[0]) / (n - 1))
