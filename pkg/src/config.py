"""
Runtime settings, read from JAMSENSE_* environment variables and an optional
.env file. Nested groups use a double underscore, e.g.
JAMSENSE_DRIFT__DRIFT_THRESHOLD=0.6.
"""
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .detector.mlp import TrainConfig
from .errors import ConfigError
from .labeler.labeler import LabelerConfig
from .manager.monitor import DriftMonitorConfig
from .manager.notifier import NotifyConfig
from .sim.config import SimConfig


class ServiceSettings(BaseModel):
    stream_host: str = "127.0.0.1"
    stream_port: int = Field(9100, ge=0, le=65535)
    control_host: str = "127.0.0.1"
    control_port: int = Field(8000, ge=0, le=65535)
    registry_dir: Path = Path("./registry")
    sample_period_ms: int = Field(100, ge=1)
    gap_factor: int = Field(5, ge=1)
    async_prediction_log: bool = True

    @property
    def control_url(self) -> str:
        return f"http://{self.control_host}:{self.control_port}"


class StoreSettings(BaseModel):
    root: Path = Path("./data/store")
    fsync: bool = False
    checkpoint_every: int = Field(1000, ge=1)


class Settings(BaseSettings):
    """All jamsense settings."""
    model_config = SettingsConfigDict(
        env_prefix="JAMSENSE_",
        env_nested_delimiter="__",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = "INFO"
    sim: SimConfig = Field(default_factory=SimConfig)
    labeler: LabelerConfig = Field(default_factory=LabelerConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    drift: DriftMonitorConfig = Field(default_factory=DriftMonitorConfig)
    service: ServiceSettings = Field(default_factory=ServiceSettings)
    store: StoreSettings = Field(default_factory=StoreSettings)
    notify: NotifyConfig = Field(default_factory=NotifyConfig)


def load_settings(**overrides) -> Settings:
    """
    Build settings from the environment, applying keyword overrides on top.

    Raises:
        ConfigError: any value is invalid
    """
    try:
        return Settings(**overrides)
    except ValidationError as e:
        raise ConfigError(f"Invalid settings: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return load_settings()
