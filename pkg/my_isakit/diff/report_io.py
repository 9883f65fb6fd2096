# coding=utf-8
#
# report_io.py
# RunReport 的持久化：单文档 JSON 与逐行 JSONL（header / event / footer）
#

import json
import logging
from pathlib import Path
from typing import Any, Iterable, Optional

from ..isa.types import TraceEvent
from .types import REPORT_SCHEMA_VERSION, RunReport

logger = logging.getLogger(__name__)

_HEADER_FIELDS = (
    "schema_version",
    "program_digest",
    "program_base",
    "program_entry",
    "program_size",
    "budget",
    "mode",
    "reference_initial",
    "candidate_initial",
    "candidate_config",
    "fault_spec",
)
_FOOTER_FIELDS = ("step_count", "stop_reason", "discrepancies", "reference_fault", "candidate_fault")


def report_to_json(report: RunReport) -> str:
    return report.model_dump_json(indent=2) + "\n"


def report_from_json(text: str) -> RunReport:
    return RunReport.model_validate_json(text)


def write_report(report: RunReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_to_json(report), encoding="utf-8")
    logger.debug(f"Report written to {path}")
    return path


def read_report(path: str | Path) -> RunReport:
    return report_from_json(Path(path).read_text(encoding="utf-8"))


def report_records(
    report: RunReport, extra: Optional[dict[str, Any]] = None
) -> Iterable[dict[str, Any]]:
    """header, one event per trace entry (reference first), footer

    ``extra`` keys are added to the header record and ignored when reading back.
    """
    doc = report.model_dump(mode="json")
    yield {"record": "header", **{name: doc[name] for name in _HEADER_FIELDS}, **(extra or {})}
    for side, key in (("reference", "reference_trace"), ("candidate", "candidate_trace")):
        for event in doc[key]:
            yield {"record": "event", "side": side, **event}
    yield {"record": "footer", **{name: doc[name] for name in _FOOTER_FIELDS}}


def report_to_jsonl(report: RunReport, extra: Optional[dict[str, Any]] = None) -> str:
    return "".join(
        json.dumps(record, separators=(",", ":")) + "\n" for record in report_records(report, extra)
    )


def report_from_jsonl(text: str) -> RunReport:
    """
    Raises:
        ValueError: missing header/footer, unknown record or schema version
    """
    header = footer = None
    traces: dict[str, list[TraceEvent]] = {"reference": [], "candidate": []}
    for number, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        record = json.loads(line)
        match record.pop("record", None):
            case "header":
                header = record
            case "footer":
                footer = record
            case "event":
                side = record.pop("side")
                traces[side].append(TraceEvent.model_validate(record))
            case other:
                raise ValueError(f"line {number}: unknown record type {other!r}")
    if header is None or footer is None:
        raise ValueError("report stream needs a header and a footer record")
    if header.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema version {header.get('schema_version')}")
    return RunReport.model_validate(
        {
            **header,
            **footer,
            "reference_trace": traces["reference"],
            "candidate_trace": traces["candidate"],
        }
    )


def write_report_jsonl(
    report: RunReport, path: str | Path, extra: Optional[dict[str, Any]] = None
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_to_jsonl(report, extra), encoding="utf-8")
    return path


def read_report_jsonl(path: str | Path) -> RunReport:
    return report_from_jsonl(Path(path).read_text(encoding="utf-8"))
