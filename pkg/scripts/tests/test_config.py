"""
Tests for environment-driven settings.
"""
import pytest

from src.config import Settings, load_settings
from src.errors import ConfigError


def test_defaults():
    settings = load_settings()
    assert settings.drift.drift_threshold == 0.70
    assert settings.drift.eval_window == 100
    assert settings.labeler.tau == 0.0004
    assert settings.labeler.batch_size == 30
    assert settings.train.arch == [60, 32, 16, 8, 2]
    assert settings.service.sample_period_ms == 100


def test_nested_env_override(monkeypatch):
    monkeypatch.setenv("JAMSENSE_DRIFT__DRIFT_THRESHOLD", "0.6")
    monkeypatch.setenv("JAMSENSE_SERVICE__STREAM_PORT", "9200")
    settings = Settings()
    assert settings.drift.drift_threshold == 0.6
    assert settings.service.stream_port == 9200


def test_keyword_overrides():
    settings = load_settings(log_level="DEBUG")
    assert settings.log_level == "DEBUG"


def test_invalid_values_are_config_errors(monkeypatch):
    monkeypatch.setenv("JAMSENSE_SERVICE__STREAM_PORT", "not-a-port")
    with pytest.raises(ConfigError):
        load_settings()


def test_out_of_range_threshold(monkeypatch):
    monkeypatch.setenv("JAMSENSE_DRIFT__DRIFT_THRESHOLD", "1.5")
    with pytest.raises(ConfigError):
        load_settings()


def test_control_url():
    settings = load_settings()
    assert settings.service.control_url == f"http://{settings.service.control_host}:{settings.service.control_port}"
