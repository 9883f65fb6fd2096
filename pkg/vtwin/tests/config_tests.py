# coding=utf-8
#
# config_tests.py
# HarnessConfig 的解析优先级、.env 加载与产物信封
#

import json
import logging
import os

import pytest
from rich.console import Console

from vtwin import config as vtwin_config
from vtwin.config import TIMEOUT_ENV, ConfigError, HarnessConfig, resolve_harness_config
from vtwin.context import Context, unwrap_artifact
from vtwin.version import get_app_version, version_from_pyproject
from vtwin.vtwin import apply_app_log_level
from .conftest import read_artifact

logger = logging.getLogger(__name__)


def _document(tmp_path, values) -> str:
    path = tmp_path / "harness.json"
    path.write_text(json.dumps(values), encoding="utf-8")
    return str(path)


def test_defaults(monkeypatch):
    monkeypatch.delenv(TIMEOUT_ENV, raising=False)
    config = resolve_harness_config(None, {})
    assert config.reference == "golden" and config.uses_golden
    assert config.seed == 0
    assert config.max_steps == 1000
    assert config.max_iters == 10
    assert config.timeout_secs == 5.0
    assert config.workers >= 1


def test_precedence_document_env_arguments(tmp_path, monkeypatch):
    path = _document(tmp_path, {"seed": 3, "max_steps": 50, "timeout_secs": 1.0})
    monkeypatch.delenv(TIMEOUT_ENV, raising=False)
    config = resolve_harness_config(path, {"max_steps": 70})
    assert (config.seed, config.max_steps, config.timeout_secs) == (3, 70, 1.0)

    monkeypatch.setenv(TIMEOUT_ENV, "2.5")
    assert resolve_harness_config(path, {}).timeout_secs == 2.5
    assert resolve_harness_config(path, {"timeout_secs": 9.0}).timeout_secs == 9.0


@pytest.mark.parametrize(
    "values",
    [
        {"max_steps": 0},
        {"workers": 0},
        {"timeout_secs": 0},
        {"colour": "blue"},
        {"program": "/nonexistent/program.bin"},
        {"programs_dir": "/nonexistent"},
    ],
)
def test_invalid_values(values, monkeypatch):
    monkeypatch.delenv(TIMEOUT_ENV, raising=False)
    with pytest.raises(ConfigError):
        resolve_harness_config(None, values)


def test_invalid_documents(tmp_path, monkeypatch):
    monkeypatch.delenv(TIMEOUT_ENV, raising=False)
    with pytest.raises(ConfigError):
        resolve_harness_config(str(tmp_path / "missing.json"), {})
    with pytest.raises(ConfigError):
        resolve_harness_config(_document(tmp_path, [1, 2]), {})
    monkeypatch.setenv(TIMEOUT_ENV, "soon")
    with pytest.raises(ConfigError):
        resolve_harness_config(None, {})


def test_load_config_creates_default_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path))
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".env").write_text("VTWIN_TEST_FROM_CWD=1\n", encoding="utf-8")
    monkeypatch.delenv("VTWIN_TEST_FROM_CWD", raising=False)

    vtwin_config.load_config()
    env_file = tmp_path / ".vtwin" / "config" / ".env"
    assert env_file.exists()
    assert "HARNESS_TIMEOUT_SECS" in env_file.read_text(encoding="utf-8")
    assert os.environ["VTWIN_TEST_FROM_CWD"] == "1"
    monkeypatch.delenv("VTWIN_TEST_FROM_CWD")


def test_artifact_envelope(tmp_path):
    config = HarnessConfig(out_dir=str(tmp_path), seed=11)
    context = Context(console=Console(), config=config, err_console=Console(stderr=True))
    path = context.write_artifact("nested/thing.json", "score", {"aggregate": 0.5})
    doc = read_artifact(path)
    assert list(doc) == ["schema_version", "kind", "tool_version", "harness_config", "payload"]
    assert doc["harness_config"]["seed"] == 11
    assert unwrap_artifact(doc) == {"aggregate": 0.5}
    assert unwrap_artifact({"payload": 1}) == {"payload": 1}


def test_log_level_applies_to_both_packages():
    apply_app_log_level("DEBUG")
    try:
        kit = logging.getLogger("my_isakit")
        assert kit.level == logging.DEBUG
        assert len(kit.handlers) == 1 and not kit.propagate
        assert logging.getLogger("vtwin").level == logging.DEBUG
    finally:
        apply_app_log_level("INFO")
    assert logging.getLogger("my_isakit").level == logging.INFO


def test_version_comes_from_the_project_table(tmp_path):
    path = tmp_path / "pyproject.toml"
    path.write_text(
        '[tool.x]\nversion = "9"\n\n[project]\nname = "vtwin"\nversion = "1.2.3"\n\n[tool.y]\nversion = "7"\n',
        encoding="utf-8",
    )
    assert version_from_pyproject(path) == "1.2.3"
    path.write_text('[project]\nname = "vtwin"\n\n[tool.y]\nversion = "7"\n', encoding="utf-8")
    assert version_from_pyproject(path) is None
    assert version_from_pyproject(tmp_path / "missing.toml") is None
    assert get_app_version() == "0.1.0"
