# coding=utf-8
#
# types.py
# 差分引擎的数据类型：Discrepancy、RunReport、TraceDeltaMetrics
#

from enum import Enum
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict

from ..isa.types import ArchState, TraceEvent

REPORT_SCHEMA_VERSION = 1

REGISTER_FIELDS = tuple(f"R{i}" for i in range(15))
FLAG_FIELDS = ("N", "Z", "C", "V")
PC_FIELD = "pc"
MEMORY_FIELD = "memory"
ERROR_CLASS_FIELD = "error-class"
ALL_FIELDS = frozenset((*REGISTER_FIELDS, *FLAG_FIELDS, PC_FIELD, MEMORY_FIELD))

StopReason = Literal["completed", "budget_exhausted", "first_divergence", "error"]
RunMode = Literal["fail_fast", "run_to_budget"]


class DiscrepancyClass(str, Enum):
    REGISTER_MISMATCH = "register_mismatch"
    FLAG_MISMATCH = "flag_mismatch"
    CONTROL_FLOW_MISMATCH = "control_flow_mismatch"
    MEMORY_MISMATCH = "memory_mismatch"
    DECODE_MISMATCH = "decode_mismatch"


def memory_field(addr: int) -> str:
    return f"mem[0x{addr:08x}]"


def memory_field_address(field: str) -> Optional[int]:
    if field.startswith("mem[") and field.endswith("]"):
        return int(field[4:-1], 16)
    return None


def field_rank(field: str) -> int:
    """Canonical order: R0..R14, N, Z, C, V, pc, memory by address, error-class."""
    if field in REGISTER_FIELDS:
        return int(field[1:])
    if field in FLAG_FIELDS:
        return 16 + FLAG_FIELDS.index(field)
    if field == PC_FIELD:
        return 20
    addr = memory_field_address(field)
    if addr is not None:
        return 32 + addr
    return 1 << 40


class Discrepancy(BaseModel):
    """One field that differs between reference and candidate after step ``seq``."""

    model_config = ConfigDict(frozen=True)

    seq: int
    pc: int
    instr_word: int
    field: str
    expected: int | str
    actual: int | str
    category: DiscrepancyClass

    @property
    def sort_key(self) -> tuple[int, int]:
        return self.seq, field_rank(self.field)

    @property
    def address(self) -> Optional[int]:
        return memory_field_address(self.field)


class FaultRecord(BaseModel):
    """An architectural fault that ended (or diverged) a run on one side."""

    seq: int
    pc: int
    kind: str


class TraceDeltaMetrics(BaseModel):
    steps: int = 0
    register_delta_count: int = 0
    memory_delta_count: int = 0
    memory_locations: int = 0
    flag_delta_count: int = 0
    transition_mismatches: int = 0
    timing_deviation: float = 0.0


class RunReport(BaseModel):
    """
    One lockstep run. Contains nothing about which reference endpoint was used,
    so in-process and loopback runs of the same program serialize identically.
    """

    schema_version: int = REPORT_SCHEMA_VERSION
    program_digest: str
    program_base: int = 0
    program_entry: int = 0
    program_size: int = 0
    budget: int
    mode: RunMode
    step_count: int = 0
    stop_reason: StopReason
    discrepancies: list[Discrepancy] = []
    reference_trace: list[TraceEvent] = []
    candidate_trace: list[TraceEvent] = []
    reference_initial: ArchState
    candidate_initial: ArchState
    reference_fault: Optional[FaultRecord] = None
    candidate_fault: Optional[FaultRecord] = None
    candidate_config: Optional[dict[str, Any]] = None
    fault_spec: Optional[dict[str, Any]] = None

    @property
    def diverged(self) -> bool:
        return bool(self.discrepancies)

    @property
    def first_discrepancy(self) -> Optional[Discrepancy]:
        return self.discrepancies[0] if self.discrepancies else None

    def count_by_class(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for d in self.discrepancies:
            counts[d.category.value] = counts.get(d.category.value, 0) + 1
        return counts
