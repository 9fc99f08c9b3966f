"""
Versioned model registry on a shared directory.

Layout::

    <root>/v<N>/model.bin
    <root>/v<N>/meta.json
    <root>/LATEST            (contains N, replaced atomically)
"""
import hashlib
import json
import logging
import os
import re
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from ..detector.mlp import MlpModel
from ..detector.serialization import load_model, save_model
from ..errors import FetchError, FormatError

logger = logging.getLogger(__name__)

URI_SCHEME = "registry://"
_URI_RE = re.compile(r"^registry://v(\d+)$")
_VERSION_DIR_RE = re.compile(r"^v(\d+)$")


def registry_uri(version: int) -> str:
    return f"{URI_SCHEME}v{version}"


def parse_registry_uri(uri: str) -> int:
    """
    Version number named by a registry URI.

    Raises:
        FormatError: not of the form registry://v<N>
    """
    match = _URI_RE.match(uri or "")
    if not match:
        raise FormatError(f"invalid registry uri {uri!r}")
    return int(match.group(1))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class ModelRegistry:
    """Directory of immutable model versions with a LATEST pointer."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @property
    def latest_path(self) -> Path:
        return self.root / "LATEST"

    def version_dir(self, version: int) -> Path:
        return self.root / f"v{version}"

    def versions(self) -> List[int]:
        """Registered versions in ascending order."""
        found = []
        for entry in self.root.iterdir():
            match = _VERSION_DIR_RE.match(entry.name)
            if match and (entry / "model.bin").exists():
                found.append(int(match.group(1)))
        return sorted(found)

    def latest_version(self) -> Optional[int]:
        if not self.latest_path.exists():
            return None
        text = self.latest_path.read_text().strip()
        return int(text) if text.isdigit() else None

    def register(self, model: MlpModel) -> int:
        """
        Store a model as the next version and move LATEST to it.

        Args:
            model: Trained model; its metadata version is overwritten

        Returns:
            The new version number
        """
        with self._lock:
            existing = self.versions()
            version = (existing[-1] if existing else 0) + 1
            model = model.with_metadata(version=version)

            vdir = self.version_dir(version)
            vdir.mkdir(parents=True, exist_ok=False)
            model_path = save_model(model, vdir / "model.bin")
            meta = {
                "version": version,
                "uri": registry_uri(version),
                "sha256": _sha256(model_path),
                "metadata": model.metadata.model_dump(mode="json"),
            }
            meta_tmp = vdir / "meta.json.tmp"
            meta_tmp.write_text(json.dumps(meta, indent=2))
            os.replace(meta_tmp, vdir / "meta.json")

            pointer_tmp = self.root / "LATEST.tmp"
            pointer_tmp.write_text(f"{version}\n")
            os.replace(pointer_tmp, self.latest_path)

        logger.info(f"Registered model v{version} (parent v{model.metadata.parent_version})")
        return version

    def meta(self, version: int) -> Dict[str, Any]:
        path = self.version_dir(version) / "meta.json"
        if not path.exists():
            raise FetchError(f"model v{version} not in registry {self.root}")
        return json.loads(path.read_text())

    def load(self, version: int) -> MlpModel:
        """
        Load and verify one version.

        Raises:
            FetchError: version not registered
            FormatError: file corrupt or checksum mismatch
        """
        model_path = self.version_dir(version) / "model.bin"
        if not model_path.exists():
            raise FetchError(f"model v{version} not in registry {self.root}")
        expected = self.meta(version).get("sha256")
        if expected and _sha256(model_path) != expected:
            raise FormatError(f"model v{version} checksum mismatch")
        return load_model(model_path)

    def resolve(self, uri: str) -> MlpModel:
        """Load the version a registry://v<N> URI names."""
        return self.load(parse_registry_uri(uri))
