"""
Unsupervised interference labeler.

Smoothed UL SNR is cut into fixed batches. A batch whose average rate of
change exceeds tau triggers a fresh two-component GMM; otherwise the most
recent model is reused, and without any model the batch is held.
"""
import logging
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DegenerateBatch, DegenerateData
from ..telemetry.types import KpiSample, Label, LabeledSample, LabelSource
from .gmm import Gmm1d, em_fit, gmm_predict_many, mixture_bic, single_gaussian_bic
from .prep import Batch, SmoothingConfig, arc, moving_average, scaling_params, standard_scale

logger = logging.getLogger(__name__)


class LabelerConfig(BaseModel):
    """Labeler parameters."""
    tau: float = Field(0.0004, ge=0, description="|ARC| threshold on scaled values")
    batch_size: int = Field(30, ge=2, description="Samples per batch")
    window_w: int = Field(5, ge=1, description="Moving-average kernel width (odd)")
    min_component_weight: float = Field(
        0.1, ge=0, lt=0.5, description="Smallest mixture weight a candidate may have"
    )
    min_event_gap_db: float = Field(
        1.5, ge=0, description="Smallest SNR gap between candidate components"
    )
    em_tol: float = Field(1e-6, gt=0)
    em_max_iter: int = Field(200, ge=1)

    @property
    def smoothing(self) -> SmoothingConfig:
        return SmoothingConfig(window_w=self.window_w)


@dataclass(frozen=True)
class LabelModel:
    """
    A fitted GMM together with the scaling of the data it was trained on, so
    that later batches are compared at absolute SNR levels.
    """
    gmm: Gmm1d
    center: float
    scale: float
    interference_component: int
    trained_end_idx: int

    def components(self, smoothed_snr: Sequence[float]) -> np.ndarray:
        z = (np.asarray(smoothed_snr, dtype=np.float64) - self.center) / self.scale
        components, _ = gmm_predict_many(self.gmm, z)
        return components

    def predict(self, smoothed_snr: Sequence[float]) -> List[Label]:
        """Interference iff a value falls in the interference component."""
        return [
            Label.INTERFERENCE if c == self.interference_component else Label.NO_INTERFERENCE
            for c in self.components(smoothed_snr)
        ]

    @property
    def gap_db(self) -> float:
        return float(np.ptp(self.gmm.means) * self.scale)


@dataclass(frozen=True)
class LabelerState:
    """Labeler state carried from one batch to the next."""
    model: Optional[LabelModel] = None
    last_change_idx: int = 0
    start_idx: int = 0
    tau: float = 0.0004
    batch_size: int = 30
    # smoothed values of the previous batch
    context: Optional[np.ndarray] = None

    @property
    def current_gmm(self) -> Optional[Gmm1d]:
        return None if self.model is None else self.model.gmm

    @property
    def interference_component(self) -> Optional[int]:
        return None if self.model is None else self.model.interference_component


def should_retrain(batch: Batch, tau: float) -> bool:
    """ARC trigger on the standard-scaled batch."""
    return abs(arc(standard_scale(batch))) > tau


def fit_label_model(values: np.ndarray, end_idx: int, cfg: LabelerConfig) -> Optional[LabelModel]:
    """
    Fit a candidate label model and keep it only if it describes two events.

    Args:
        values: Smoothed SNR the model is trained on
        end_idx: Stream index just past the training data
        cfg: Labeler configuration

    Returns:
        The accepted model, or None if the data looks like a single population
    """
    try:
        center, scale = scaling_params(values)
        z = (values - center) / scale
        gmm = em_fit(z, k=2, tol=cfg.em_tol, max_iter=cfg.em_max_iter)
    except (DegenerateBatch, DegenerateData):
        return None

    if float(np.min(gmm.weights)) < cfg.min_component_weight:
        return None
    if mixture_bic(gmm, len(z)) >= single_gaussian_bic(z):
        return None
    model = LabelModel(
        gmm=gmm,
        center=center,
        scale=scale,
        interference_component=gmm.lowest_mean_component(),
        trained_end_idx=end_idx,
    )
    if model.gap_db < cfg.min_event_gap_db:
        return None
    return model


def label_batch(
    state: LabelerState,
    batch: Batch,
    cfg: Optional[LabelerConfig] = None,
) -> Tuple[List[Optional[Label]], LabelerState]:
    """
    Label one batch of smoothed SNR values.

    Args:
        state: Labeler state before this batch
        batch: Smoothed (unscaled) SNR values
        cfg: Labeler configuration; tau and batch size come from the state

    Returns:
        (labels, new state); a label of None is Hold
    """
    cfg = cfg or LabelerConfig(tau=state.tau, batch_size=state.batch_size)
    n = len(batch)
    contiguous = state.context is not None and state.start_idx == batch.start_idx
    next_state = replace(state, start_idx=batch.end_idx, context=batch.values.copy())

    try:
        triggered = should_retrain(batch, state.tau)
    except DegenerateBatch:
        logger.debug(f"Constant batch {batch.start_idx}..{batch.end_idx} held")
        return [None] * n, next_state

    model = state.model
    if triggered:
        train = np.concatenate([state.context, batch.values]) if contiguous else batch.values
        candidate = fit_label_model(train, batch.end_idx, cfg)
        if candidate is not None:
            logger.debug(
                f"New label model at {batch.end_idx}: gap {candidate.gap_db:.2f} dB"
            )
            model = candidate
            next_state = replace(next_state, model=model, last_change_idx=batch.end_idx)

    if model is None:
        return [None] * n, next_state
    return list(model.predict(batch.values)), next_state


def smooth_segment(series: np.ndarray, lo: int, hi: int, window_w: int) -> np.ndarray:
    """
    Moving average of series[lo:hi] computed with only the neighbours it needs,
    so the result equals the whole-series moving average at those positions.
    """
    half = window_w // 2
    ctx_lo = max(0, lo - half)
    ctx_hi = min(len(series), hi + half)
    smoothed = moving_average(series[ctx_lo:ctx_hi], SmoothingConfig(window_w=window_w))
    return smoothed[lo - ctx_lo:hi - ctx_lo]


class GmmLabeler:
    """
    Streaming labeler.

    Batch k is labeled once W//2 samples past its end have arrived, so every
    smoothed value is final. flush() labels the remaining complete batches with
    edge padding at the end of the stream.
    """

    def __init__(self, cfg: Optional[LabelerConfig] = None):
        """
        Initialize the labeler.

        Args:
            cfg: Labeler configuration
        """
        self.cfg = cfg or LabelerConfig()
        self.state = LabelerState(tau=self.cfg.tau, batch_size=self.cfg.batch_size)
        self._samples: List[KpiSample] = []
        self._snr: List[float] = []
        # stream index of self._samples[0]
        self._base = 0
        self._next_batch = 0

    @property
    def batches_labeled(self) -> int:
        return self._next_batch

    @property
    def samples_seen(self) -> int:
        return self._base + len(self._samples)

    def push(self, samples: Iterable[KpiSample]) -> List[LabeledSample]:
        """
        Accumulate samples and label every batch that is ready.

        Returns:
            Newly labeled samples, in stream order
        """
        for s in samples:
            self._samples.append(s)
            self._snr.append(s.ul_snr)

        half = self.cfg.window_w // 2
        out: List[LabeledSample] = []
        while self._batch_end(self._next_batch) + half <= self.samples_seen:
            out.extend(self._label_next())
        return out

    def flush(self) -> List[LabeledSample]:
        """Label any complete batches still waiting for look-ahead samples."""
        out: List[LabeledSample] = []
        while self._batch_end(self._next_batch) <= self.samples_seen:
            out.extend(self._label_next())
        return out

    def _batch_end(self, k: int) -> int:
        return (k + 1) * self.cfg.batch_size

    def _label_next(self) -> List[LabeledSample]:
        k = self._next_batch
        start = k * self.cfg.batch_size
        end = start + self.cfg.batch_size

        snr = np.asarray(self._snr, dtype=np.float64)
        smoothed = smooth_segment(snr, start - self._base, end - self._base, self.cfg.window_w)
        labels, self.state = label_batch(self.state, Batch(smoothed, start, end), self.cfg)

        out = [
            LabeledSample(
                sample=self._samples[start - self._base + i],
                label=label,
                source=LabelSource.AUTO_GMM,
                batch_id=k,
            )
            for i, label in enumerate(labels)
        ]
        self._next_batch += 1
        self._trim()
        return out

    def _trim(self) -> None:
        # keep the look-behind the next batch's smoothing needs
        keep_from = self._next_batch * self.cfg.batch_size - self.cfg.window_w // 2
        drop = keep_from - self._base
        if drop > 0:
            del self._samples[:drop]
            del self._snr[:drop]
            self._base += drop


def run_labeler(
    stream: Iterable[KpiSample],
    cfg: Optional[LabelerConfig] = None,
    store=None,
) -> List[LabeledSample]:
    """
    Label a complete stream offline.

    Args:
        stream: Samples ordered by timestamp
        cfg: Labeler configuration
        store: Optional time-series store; labeled samples are appended to it

    Returns:
        Labeled samples for every complete batch
    """
    labeler = GmmLabeler(cfg)
    labeled = labeler.push(stream)
    labeled.extend(labeler.flush())
    if store is not None:
        for ls in labeled:
            store.append_labeled(ls)
    held = sum(1 for ls in labeled if ls.is_hold)
    logger.info(f"Labeled {len(labeled)} samples ({held} held) in {labeler.batches_labeled} batches")
    return labeled
