"""
Dense interference classifier: ReLU hidden layers, softmax output, trained
with mini-batch RMSprop on cross-entropy.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..errors import InsufficientData, ShapeError, SingleClassData
from .windows import N_CHANNELS, FeatureWindow, windows_to_arrays

logger = logging.getLogger(__name__)

DEFAULT_ARCH = (60, 32, 16, 8, 2)
_STD_FLOOR = 1e-12


class TrainConfig(BaseModel):
    """Detector training hyper-parameters."""
    optimizer: Literal["rmsprop"] = "rmsprop"
    learning_rate: float = Field(0.01, gt=0)
    epochs: int = Field(50, ge=1)
    batch_size: int = Field(64, ge=1)
    rms_decay: float = Field(0.9, gt=0, lt=1)
    rms_epsilon: float = Field(1e-8, gt=0)
    seed: int = 0
    arch: List[int] = Field(default_factory=lambda: list(DEFAULT_ARCH))

    @field_validator("arch")
    @classmethod
    def _valid_arch(cls, arch: List[int]) -> List[int]:
        if len(arch) < 2 or any(size < 1 for size in arch):
            raise ValueError(f"invalid layer sizes {arch}")
        if arch[0] % N_CHANNELS != 0:
            raise ValueError(f"input size {arch[0]} is not a multiple of {N_CHANNELS} channels")
        if arch[-1] != 2:
            raise ValueError("output layer must have 2 units")
        return arch


class ModelMetadata(BaseModel):
    """Provenance carried inside every model file."""
    version: Optional[int] = None
    parent_version: Optional[int] = None
    trained_at: Optional[int] = Field(None, description="Logical time of training (ms)")
    train_range: Optional[Tuple[int, int]] = Field(None, description="[first_ts, last_ts] of training labels")
    eval_accuracy: Optional[float] = Field(None, description="Accuracy on the training windows")
    n_train: int = 0
    reason: Optional[str] = None
    loss_history: List[float] = Field(default_factory=list)


@dataclass(frozen=True)
class MlpModel:
    """
    Immutable trained network. Weight matrices are (fan_in, fan_out).
    """
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    norm_mean: np.ndarray
    norm_std: np.ndarray
    metadata: ModelMetadata = field(default_factory=ModelMetadata)

    def __post_init__(self):
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape[1] != b.shape[0]:
                raise ShapeError(f"layer {i}: weight {W.shape} vs bias {b.shape}")
            if i > 0 and self.weights[i - 1].shape[1] != W.shape[0]:
                raise ShapeError(f"layer {i}: input {W.shape[0]} != previous output")
        if self.norm_mean.shape != (N_CHANNELS,) or self.norm_std.shape != (N_CHANNELS,):
            raise ShapeError("norm_stats need one mean/std per channel")
        if np.any(self.norm_std <= 0):
            raise ShapeError("norm_stats std must be positive")

    @property
    def arch(self) -> List[int]:
        return [self.weights[0].shape[0]] + [W.shape[1] for W in self.weights]

    @property
    def version(self) -> Optional[int]:
        return self.metadata.version

    def with_metadata(self, **updates) -> "MlpModel":
        return replace(self, metadata=self.metadata.model_copy(update=updates))

    def normalize(self, X: np.ndarray) -> np.ndarray:
        m, d = X.shape
        steps = X.reshape(m, d // N_CHANNELS, N_CHANNELS)
        return ((steps - self.norm_mean) / self.norm_std).reshape(m, d)

    def _as_batch(self, X: Union[np.ndarray, FeatureWindow, Sequence[float]]) -> np.ndarray:
        if isinstance(X, FeatureWindow):
            X = X.values
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.arch[0]:
            raise ShapeError(f"expected input width {self.arch[0]}, got shape {X.shape}")
        return X

    def logits(self, X) -> np.ndarray:
        return _forward(self, self.normalize(self._as_batch(X)))[-1]

    def predict_proba(self, X) -> np.ndarray:
        """Class probabilities, shape (m, 2)."""
        return softmax(self.logits(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def _forward(model: MlpModel, Xn: np.ndarray) -> List[np.ndarray]:
    """Activations of every layer; the last entry is the logits."""
    outputs = [Xn]
    h = Xn
    last = len(model.weights) - 1
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W + b
        h = z if i == last else np.maximum(z, 0.0)
        outputs.append(h)
    return outputs


def forward(m: MlpModel, w: Union[FeatureWindow, Sequence[float]]) -> np.ndarray:
    """
    Probabilities [p0, p1] for a single window.

    Raises:
        ShapeError: input width does not match the model
    """
    return m.predict_proba(w)[0]


def cross_entropy(model: MlpModel, X: np.ndarray, y: np.ndarray) -> float:
    """Mean cross-entropy of raw (unnormalized) inputs."""
    logp = _log_softmax(model.logits(X))
    return float(-np.mean(logp[np.arange(len(y)), y]))


def _gradients(model: MlpModel, Xn: np.ndarray, y: np.ndarray) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    outputs = _forward(model, Xn)
    logits = outputs[-1]
    m = len(y)
    logp = _log_softmax(logits)
    loss = float(-np.mean(logp[np.arange(m), y]))

    delta = np.exp(logp)
    delta[np.arange(m), y] -= 1.0
    delta /= m

    grad_w: List[np.ndarray] = [None] * len(model.weights)
    grad_b: List[np.ndarray] = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        grad_w[i] = outputs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (outputs[i] > 0)
    return loss, grad_w, grad_b


def init_model(
    arch: Sequence[int] = DEFAULT_ARCH,
    seed: int = 0,
    norm_mean: Optional[np.ndarray] = None,
    norm_std: Optional[np.ndarray] = None,
) -> MlpModel:
    """He-uniform weights scaled by fan-in, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(arch[:-1], arch[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(
        weights=tuple(weights),
        biases=tuple(biases),
        norm_mean=np.zeros(N_CHANNELS) if norm_mean is None else np.asarray(norm_mean, dtype=np.float64),
        norm_std=np.ones(N_CHANNELS) if norm_std is None else np.asarray(norm_std, dtype=np.float64),
    )


def fit_norm_stats(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-channel mean/std over every step of every window."""
    per_step = X.reshape(-1, N_CHANNELS)
    mean = per_step.mean(axis=0)
    std = per_step.std(axis=0)
    std = np.where(std < _STD_FLOOR, 1.0, std)
    return mean, std


def train(
    data: Sequence[FeatureWindow],
    cfg: Optional[TrainConfig] = None,
    metadata: Optional[ModelMetadata] = None,
) -> MlpModel:
    """
    Train a detector from labeled windows.

    Args:
        data: Labeled feature windows
        cfg: Training configuration
        metadata: Provenance to attach; loss history and accuracy are filled in

    Returns:
        Trained model carrying its normalization stats

    Raises:
        SingleClassData: only one label present
        InsufficientData: fewer windows than one mini-batch
    """
    cfg = cfg or TrainConfig()
    X, y = windows_to_arrays(data)
    if np.any(y < 0):
        raise InsufficientData("training windows must be labeled")
    if len(np.unique(y)) < 2:
        raise SingleClassData(f"all {len(y)} windows have label {int(y[0])}")
    if len(X) < cfg.batch_size:
        raise InsufficientData(f"{len(X)} windows is less than one batch of {cfg.batch_size}")

    norm_mean, norm_std = fit_norm_stats(X)
    model = init_model(cfg.arch, cfg.seed, norm_mean, norm_std)
    if X.shape[1] != model.arch[0]:
        raise ShapeError(f"windows have width {X.shape[1]}, model expects {model.arch[0]}")
    Xn = model.normalize(X)

    weights = [W.copy() for W in model.weights]
    biases = [b.copy() for b in model.biases]
    cache_w = [np.zeros_like(W) for W in weights]
    cache_b = [np.zeros_like(b) for b in biases]
    rng = np.random.default_rng(cfg.seed + 1)
    n = len(X)
    losses = []

    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            current = replace(model, weights=tuple(weights), biases=tuple(biases))
            loss, grad_w, grad_b = _gradients(current, Xn[idx], y[idx])
            epoch_loss += loss * len(idx)
            for params, grads, caches in ((weights, grad_w, cache_w), (biases, grad_b, cache_b)):
                for i, g in enumerate(grads):
                    caches[i] = cfg.rms_decay * caches[i] + (1.0 - cfg.rms_decay) * g * g
                    params[i] = params[i] - cfg.learning_rate * g / (np.sqrt(caches[i]) + cfg.rms_epsilon)
        losses.append(epoch_loss / n)

    trained = replace(model, weights=tuple(weights), biases=tuple(biases))
    accuracy = float(np.mean(trained.predict(X) == y))
    meta = (metadata or ModelMetadata()).model_copy(
        update={"loss_history": losses, "eval_accuracy": accuracy, "n_train": n}
    )
    logger.info(f"Trained on {n} windows: loss {losses[0]:.4f} -> {losses[-1]:.4f}, accuracy {accuracy:.3f}")
    return replace(trained, metadata=meta)


def _hidden_masks(model: MlpModel, Xn: np.ndarray) -> List[np.ndarray]:
    outputs = _forward(model, Xn)
    return [h > 0 for h in outputs[1:-1]]


def gradient_check(m: MlpModel, w: Union[FeatureWindow, Sequence[float]], label: int,
                   h: float = 1e-5) -> float:
    """
    Largest relative error between backprop and central finite differences.

    Parameters whose perturbation flips a ReLU on or off are skipped; the
    denominator is floored at 1e-6.

    Returns:
        max |analytic - numeric| / max(|analytic| + |numeric|, 1e-6)
    """
    analytic, numeric, valid = gradient_pairs(m, w, label, h)
    errors = [
        np.abs(a - n)[ok] / np.maximum(np.abs(a) + np.abs(n), 1e-6)[ok]
        for a, n, ok in zip(analytic, numeric, valid)
    ]
    flat = np.concatenate([e.ravel() for e in errors]) if errors else np.zeros(0)
    return float(flat.max()) if flat.size else 0.0


def gradient_pairs(m: MlpModel, w, label: int, h: float = 1e-5):
    """
    Analytic and numeric gradients for every parameter array.

    Returns:
        (analytic, numeric, valid) lists ordered as weights then biases
    """
    X = m._as_batch(w)
    Xn = m.normalize(X)
    y = np.asarray([label])
    _, grad_w, grad_b = _gradients(m, Xn, y)
    analytic = list(grad_w) + list(grad_b)

    params = [W.copy() for W in m.weights] + [b.copy() for b in m.biases]
    n_layers = len(m.weights)
    base_masks = _hidden_masks(m, Xn)

    def evaluate(arrays):
        probe = replace(m, weights=tuple(arrays[:n_layers]), biases=tuple(arrays[n_layers:]))
        logp = _log_softmax(_forward(probe, Xn)[-1])
        return -float(logp[0, label]), _hidden_masks(probe, Xn)

    numeric, valid = [], []
    for p in params:
        num = np.zeros_like(p)
        ok = np.ones(p.shape, dtype=bool)
        flat, num_flat, ok_flat = p.reshape(-1), num.reshape(-1), ok.reshape(-1)
        for j in range(flat.size):
            original = flat[j]
            flat[j] = original + h
            loss_plus, masks_plus = evaluate(params)
            flat[j] = original - h
            loss_minus, masks_minus = evaluate(params)
            flat[j] = original
            num_flat[j] = (loss_plus - loss_minus) / (2.0 * h)
            ok_flat[j] = all(
                np.array_equal(a, b) and np.array_equal(a, c)
                for a, b, c in zip(base_masks, masks_plus, masks_minus)
            )
        numeric.append(num)
        valid.append(ok)
    return analytic, numeric, valid
