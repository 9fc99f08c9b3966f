"""
Versioned model file: one JSON header line, then little-endian float64
values (each layer's weights row-major then its biases, then the
normalization means and stds).
"""
import json
import os
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from ..errors import FormatError, VersionError
from .mlp import MlpModel, ModelMetadata
from .windows import N_CHANNELS

FORMAT_NAME = "jamsense-mlp"
FORMAT_VERSION = 1
_DTYPE = np.dtype("<f8")


def model_to_bytes(m: MlpModel) -> bytes:
    header = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "arch": m.arch,
        "n_channels": N_CHANNELS,
        "metadata": m.metadata.model_dump(mode="json"),
    }
    chunks = []
    for W, b in zip(m.weights, m.biases):
        chunks.append(np.ascontiguousarray(W).ravel())
        chunks.append(b)
    chunks.extend([m.norm_mean, m.norm_std])
    payload = np.concatenate(chunks).astype(_DTYPE).tobytes()
    return (json.dumps(header) + "\n").encode("utf-8") + payload


def model_from_bytes(data: bytes) -> MlpModel:
    newline = data.find(b"\n")
    if newline < 0:
        raise FormatError("missing header line")
    try:
        header = json.loads(data[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"unreadable header: {e}") from e
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise FormatError("not a jamsense model file")

    version = header.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise FormatError(f"invalid format_version {version!r}")
    if version > FORMAT_VERSION:
        raise VersionError(f"format_version {version} is newer than {FORMAT_VERSION}")

    arch = header.get("arch")
    if (not isinstance(arch, list) or len(arch) < 2
            or not all(isinstance(a, int) and a > 0 for a in arch)):
        raise FormatError(f"invalid arch {arch!r}")
    if header.get("n_channels", N_CHANNELS) != N_CHANNELS:
        raise FormatError("channel count mismatch")

    payload = data[newline + 1:]
    expected = sum(a * b + b for a, b in zip(arch[:-1], arch[1:])) + 2 * N_CHANNELS
    if len(payload) != expected * _DTYPE.itemsize:
        raise FormatError(f"payload has {len(payload)} bytes, expected {expected * _DTYPE.itemsize}")
    values = np.frombuffer(payload, dtype=_DTYPE).astype(np.float64)

    weights, biases = [], []
    offset = 0
    for fan_in, fan_out in zip(arch[:-1], arch[1:]):
        weights.append(values[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out).copy())
        offset += fan_in * fan_out
        biases.append(values[offset:offset + fan_out].copy())
        offset += fan_out
    norm_mean = values[offset:offset + N_CHANNELS].copy()
    norm_std = values[offset + N_CHANNELS:offset + 2 * N_CHANNELS].copy()

    try:
        metadata = ModelMetadata.model_validate(header.get("metadata") or {})
    except ValidationError as e:
        raise FormatError(f"invalid metadata: {e}") from e
    try:
        return MlpModel(tuple(weights), tuple(biases), norm_mean, norm_std, metadata)
    except Exception as e:
        raise FormatError(f"inconsistent model: {e}") from e


def save_model(m: MlpModel, path: Union[str, Path]) -> Path:
    """
    Write a model file atomically.

    Args:
        m: Model to save
        path: Destination file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(model_to_bytes(m))
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)
    return path


def load_model(path: Union[str, Path]) -> MlpModel:
    """
    Read a model file.

    Raises:
        FormatError: corrupt or foreign file
        VersionError: written by a newer format version
    """
    return model_from_bytes(Path(path).read_bytes())
