import os
import sys

import pytest

sys.path.append(os.path.abspath("."))

from src.config import Settings, load_settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("FRAMEKIT_TOL", raising=False)
    monkeypatch.delenv("FRAMEKIT_CONFIG_PATH", raising=False)


def test_config_loading():
    """The shipped config file holds the documented defaults."""
    config_path = "config/framekit.config.yaml"
    assert os.path.exists(config_path), "Config file not found"

    settings = load_settings(config_path)
    assert settings == Settings()
    assert settings.tolerance == 1e-9
    assert settings.oracle_max_iter == 10000


def test_missing_config_falls_back_to_defaults(tmp_path):
    settings = load_settings(str(tmp_path / "absent.yaml"))
    assert settings == Settings()


def test_priority_flag_over_env_over_file(tmp_path, monkeypatch):
    path = tmp_path / "custom.yaml"
    path.write_text("framekit:\n  tolerance: 1.0e-6\n  batch_workers: 2\n")
    monkeypatch.setenv("FRAMEKIT_CONFIG_PATH", str(path))

    settings = load_settings()
    assert settings.tolerance == 1e-6
    assert settings.batch_workers == 2

    monkeypatch.setenv("FRAMEKIT_TOL", "1e-7")
    assert load_settings().tolerance == 1e-7
    assert load_settings(tolerance=1e-3).tolerance == 1e-3


def test_invalid_values_fall_back(tmp_path, monkeypatch):
    path = tmp_path / "bad.yaml"
    path.write_text("framekit:\n  tolerance: -1\n")
    assert load_settings(str(path)) == Settings()

    monkeypatch.setenv("FRAMEKIT_TOL", "tight")
    assert load_settings(str(tmp_path / "absent.yaml")).tolerance == 1e-9


def test_unparseable_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("framekit: [unclosed\n")
    assert load_settings(str(path)) == Settings()
