# coding=utf-8
#
# context.py
# 命令执行上下文：解析后的配置、渲染器与输出目录
#

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from rich.console import Console

from my_isakit.diff import RunReport, write_report_jsonl

from .config import HARNESS_SCHEMA_VERSION, HarnessConfig
from .display import NotificationRenderer, ReportRenderer
from .version import get_app_version

logger = logging.getLogger(__name__)

ARTIFACT_KEYS = ("schema_version", "kind", "tool_version", "harness_config", "payload")


def unwrap_artifact(doc: Any) -> Any:
    """Payload of an artifact envelope; other documents pass through unchanged."""
    if isinstance(doc, dict) and "payload" in doc and "harness_config" in doc:
        return doc["payload"]
    return doc


@dataclass
class Context:
    console: Console
    config: HarnessConfig
    err_console: Console

    # Display renderers
    notification_display: NotificationRenderer = field(init=False)
    report_display: ReportRenderer = field(init=False)

    def __post_init__(self):
        self.notification_display = NotificationRenderer(self.console, self.err_console)
        self.report_display = ReportRenderer(self.console)

    @property
    def out_dir(self) -> Path:
        return Path(self.config.out_dir)

    def out_path(self, *parts: str) -> Path:
        path = self.out_dir.joinpath(*parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def envelope(self, kind: str, payload: Any) -> dict[str, Any]:
        return {
            "schema_version": HARNESS_SCHEMA_VERSION,
            "kind": kind,
            "tool_version": get_app_version(),
            "harness_config": self.config.document(),
            "payload": payload,
        }

    def write_artifact(self, relative: str, kind: str, payload: Any) -> Path:
        """JSON envelope carrying the resolved invocation config next to the payload."""
        path = self.out_path(relative)
        text = json.dumps(self.envelope(kind, payload), indent=2, sort_keys=False) + "\n"
        path.write_text(text, encoding="utf-8")
        logger.debug(f"Wrote {kind} to {path}")
        return path

    def write_run_report(self, report: RunReport, relative: str) -> Path:
        extra = {"harness_config": self.config.document(), "tool_version": get_app_version()}
        return write_report_jsonl(report, self.out_path(relative), extra)
