# coding=utf-8
#
# config.py
#
# 加载 .env 与 HarnessConfig
#
# 优先级：默认值 < --config 文档 < 环境变量 HARNESS_TIMEOUT_SECS < 命令行参数
#

import json
import logging
import os
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .top import DEFAULT_LISTEN, DEFAULT_OUT_DIR, vtwin_config_dir

logger = logging.getLogger(__name__)

HARNESS_SCHEMA_VERSION = 1
TIMEOUT_ENV = "HARNESS_TIMEOUT_SECS"


def get_config_filepath():
    return os.path.join(vtwin_config_dir(), ".env")


def load_config():
    """~/.vtwin/config/.env, then ./.env; existing environment variables win."""
    try:
        env_filename = get_config_filepath()
        if not os.path.exists(env_filename):
            create_default_env()
        load_dotenv(env_filename)
    except OSError as exc:
        logger.debug(f"Skipping home .env: {exc}")
    if os.path.exists(".env"):
        load_dotenv(".env")


def create_default_env():
    env_filename = get_config_filepath()
    with open(env_filename, "w") as f:
        default_content = """
# RSP protocol timeout and per-iteration synthesizer timeout, in seconds
# HARNESS_TIMEOUT_SECS=5.0

# enable the full-scale acceptance tests
# VTWIN_SLOW_TESTS=1

# external RSP reference for the interop smoke test
# VTWIN_INTEROP_ENDPOINT="127.0.0.1:1234"
            """
        f.write(default_content.strip() + "\n")
        logger.info(f"Default .env file created at {env_filename}")


class HarnessConfig(BaseModel):
    """Resolved settings of one invocation; written into every artifact."""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = HARNESS_SCHEMA_VERSION
    reference: str = "golden"
    candidate: Optional[str] = None
    layout: Optional[str] = None
    weights: Optional[str] = None
    seed: int = 0
    max_steps: int = Field(default=1000, ge=1)
    max_iters: int = Field(default=10, ge=1)
    fail_fast: bool = False
    out_dir: str = DEFAULT_OUT_DIR
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    timeout_secs: float = Field(default=5.0, gt=0)
    listen: str = DEFAULT_LISTEN
    program: Optional[str] = None
    programs_dir: Optional[str] = None
    program_count: int = Field(default=100, ge=0)
    program_length: int = Field(default=1000, ge=2)
    load_address: int = 0
    synth: Optional[str] = None
    campaign: Optional[str] = None
    fault_count: int = Field(default=16, ge=0)
    reports: list[str] = []

    @property
    def uses_golden(self) -> bool:
        return self.reference == "golden"

    def missing_paths(self) -> list[str]:
        paths = [self.candidate, self.layout, self.weights, self.program, self.campaign, *self.reports]
        missing = [p for p in paths if p and not Path(p).exists()]
        if self.programs_dir and not Path(self.programs_dir).is_dir():
            missing.append(self.programs_dir)
        return missing

    def document(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


class ConfigError(ValueError):
    pass


def resolve_harness_config(path: Optional[str], overrides: dict[str, Any]) -> HarnessConfig:
    """
    Raises:
        ConfigError: unreadable document, bad values, or missing referenced paths
    """
    values: dict[str, Any] = {}
    if path:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"config {path} must be a JSON object")
    env_timeout = os.getenv(TIMEOUT_ENV)
    if env_timeout:
        try:
            values["timeout_secs"] = float(env_timeout)
        except ValueError as exc:
            raise ConfigError(f"{TIMEOUT_ENV} is not a number: {env_timeout!r}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = HarnessConfig(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    missing = config.missing_paths()
    if missing:
        raise ConfigError("path does not exist: " + ", ".join(missing))
    return config
