# coding=utf-8
#
# diff 包
# 锁步差分引擎：端点、状态比较、运行报告与轨迹指标
#

from .compare import compare_memory, compare_states, fault_discrepancy
from .endpoints import (
    CandidateEndpoint,
    Endpoint,
    GoldenEndpoint,
    MachineEndpoint,
    RspEndpoint,
)
from .errors import LockstepError, SetupMismatch
from .lockstep import StepHook, as_endpoint, lockstep_run, run_many, verify_setup
from .metrics import resource_profile, trace_delta
from .report_io import (
    read_report,
    read_report_jsonl,
    report_from_json,
    report_from_jsonl,
    report_to_json,
    report_to_jsonl,
    write_report,
    write_report_jsonl,
)
from .types import (
    ALL_FIELDS,
    REPORT_SCHEMA_VERSION,
    Discrepancy,
    DiscrepancyClass,
    FaultRecord,
    RunReport,
    TraceDeltaMetrics,
    memory_field,
)

__all__ = [
    "compare_memory",
    "compare_states",
    "fault_discrepancy",
    "CandidateEndpoint",
    "Endpoint",
    "GoldenEndpoint",
    "MachineEndpoint",
    "RspEndpoint",
    "LockstepError",
    "SetupMismatch",
    "StepHook",
    "as_endpoint",
    "lockstep_run",
    "run_many",
    "verify_setup",
    "resource_profile",
    "trace_delta",
    "read_report",
    "read_report_jsonl",
    "report_from_json",
    "report_from_jsonl",
    "report_to_json",
    "report_to_jsonl",
    "write_report",
    "write_report_jsonl",
    "ALL_FIELDS",
    "REPORT_SCHEMA_VERSION",
    "Discrepancy",
    "DiscrepancyClass",
    "FaultRecord",
    "RunReport",
    "TraceDeltaMetrics",
    "memory_field",
]
