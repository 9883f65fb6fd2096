# coding=utf-8
#
# feedback.py
# 把分歧渲染为结构化的自然语言修复反馈
#
# 例：
#   CMP R0, R1 results in -10. Since the result is negative, the N flag should be
#   set (N=1). The simulation left it at 0.
#

import logging
from typing import Optional, Sequence

from pydantic import BaseModel

from ..diff.types import (
    FLAG_FIELDS,
    PC_FIELD,
    REGISTER_FIELDS,
    Discrepancy,
    DiscrepancyClass,
    RunReport,
)
from ..isa.alu import expand_imm, to_signed
from ..isa.decoder import disassemble, disassemble_word
from ..isa.types import (
    ARITHMETIC,
    COMPARES,
    DATA_PROCESSING,
    MASK32,
    SUBTRACTIONS,
    ArchState,
    DecodedInstr,
    Mnemonic,
)
from .areas import StepView, classify, field_value, step_views
from .score import FidelityScore

logger = logging.getLogger(__name__)

FEEDBACK_SCHEMA_VERSION = 1
DEFAULT_ENTRY_LIMIT = 50


class FeedbackEntry(BaseModel):
    seq: int
    pc: int
    disassembly: str
    field: str
    category: DiscrepancyClass
    expected: int | str
    actual: int | str
    expected_behavior: str
    observed_behavior: str
    area: str
    program_digest: str = ""

    @property
    def text(self) -> str:
        return f"{self.expected_behavior} {self.observed_behavior}"


class FeedbackReport(BaseModel):
    schema_version: int = FEEDBACK_SCHEMA_VERSION
    program_digests: list[str] = []
    entries: list[FeedbackEntry] = []
    total: int = 0
    truncated: int = 0
    summary: str = ""
    score: Optional[FidelityScore] = None

    @property
    def empty(self) -> bool:
        return self.total == 0

    def render_text(self) -> str:
        lines = [self.summary]
        for entry in self.entries:
            lines.append(f"[step {entry.seq} @ 0x{entry.pc:08x}] {entry.text} (area: {entry.area})")
        if self.truncated:
            lines.append(f"... {self.truncated} more discrepancies not shown")
        return "\n".join(lines)


def _alu_result(instr: DecodedInstr, state: ArchState) -> Optional[int]:
    """Reference ALU result of a data-processing instruction, compares included."""
    if instr.mnemonic not in DATA_PROCESSING:
        return None
    a = state.read_reg(instr.rn)
    if instr.rm is None:
        b, _ = expand_imm(instr.imm8, instr.rotate, state.flags.c)
    else:
        b = state.read_reg(instr.rm)
    match instr.mnemonic:
        case Mnemonic.AND | Mnemonic.TST:
            result = a & b
        case Mnemonic.EOR | Mnemonic.TEQ:
            result = a ^ b
        case Mnemonic.ORR:
            result = a | b
        case Mnemonic.MOV:
            result = b
        case Mnemonic.MVN:
            result = ~b
        case Mnemonic.ADD | Mnemonic.CMN:
            result = a + b
        case Mnemonic.SUB | Mnemonic.CMP:
            result = a - b
        case _:
            result = b - a
    return result & MASK32


def _format_result(instr: DecodedInstr, result: int) -> str:
    if instr.mnemonic in ARITHMETIC:
        return str(to_signed(result))
    return f"0x{result:08x}"


def _flag_reason(field: str, expected: int, instr: DecodedInstr, result: Optional[int]) -> str:
    state = "set" if expected else "clear"
    tail = f"the {field} flag should be {state} ({field}={expected})."
    if result is None:
        return f"{tail[0].upper()}{tail[1:]}"
    match field:
        case "N":
            reason = "the result is negative" if expected else "the result is not negative"
        case "Z":
            reason = "the result is zero" if expected else "the result is nonzero"
        case "C" if instr.mnemonic in SUBTRACTIONS:
            reason = "no borrow occurs" if expected else "a borrow occurs"
        case "C" if instr.mnemonic in ARITHMETIC:
            reason = "there is a carry out of bit 31" if expected else "there is no carry out of bit 31"
        case "C":
            reason = f"the shifter carry-out is {expected}"
        case _ if instr.mnemonic in ARITHMETIC:
            reason = "signed overflow occurs" if expected else "no signed overflow occurs"
        case _:
            reason = "logical operations leave V unchanged"
    return f"Since {reason}, {tail}"


def _observed(actual: int | str, previous: Optional[int], fmt) -> str:
    if previous is not None and previous == actual:
        return f"The simulation left it at {fmt(actual)}."
    return f"The simulation set it to {fmt(actual)}."


def _hex(value: int | str) -> str:
    return f"0x{value:08x}" if isinstance(value, int) else str(value)


def _describe(d: Discrepancy, view: StepView) -> tuple[str, str, str]:
    """(disassembly, expected sentence, observed sentence)"""
    instr = view.instr
    event = view.ref_event or view.cand_event
    if instr is None:
        dis = disassemble_word(d.instr_word, d.pc)
    else:
        dis = disassemble(instr, event.pc if event else d.pc)

    if d.category is DiscrepancyClass.DECODE_MISMATCH:
        expected = (
            f"At 0x{d.pc:08x}, {dis} should raise {d.expected}."
            if d.expected != "none"
            else f"At 0x{d.pc:08x}, {dis} should execute without a fault."
        )
        observed = (
            f"The simulation raised {d.actual}."
            if d.actual != "none"
            else "The simulation executed it without a fault."
        )
        return dis, expected, observed

    if d.category is DiscrepancyClass.MEMORY_MISMATCH:
        expected = f"After {dis}, memory at 0x{d.address:08x} should hold 0x{d.expected:08x}."
        return dis, expected, f"The simulation stored 0x{d.actual:08x} there."

    cand_prev = field_value(view.cand_before, d.field) if view.cand_before else None
    executed = view.ref_event.executed if view.ref_event else True
    result = None
    if instr is not None and executed and view.ref_before is not None:
        result = _alu_result(instr, view.ref_before)
    headline = f"{dis} results in {_format_result(instr, result)}. " if result is not None else ""

    if d.field in FLAG_FIELDS:
        if not executed:
            expected = (
                f"{dis} is not executed since its condition fails, so the {d.field} flag "
                f"should stay at {d.expected} ({d.field}={d.expected})."
            )
        elif instr is not None and instr.mnemonic in DATA_PROCESSING and not instr.sets_flags:
            expected = (
                f"{dis} does not update the flags, so the {d.field} flag should stay at "
                f"{d.expected} ({d.field}={d.expected})."
            )
        else:
            expected = headline + _flag_reason(d.field, d.expected, instr, result)
        return dis, expected, _observed(d.actual, cand_prev, str)

    if d.field == PC_FIELD:
        expected = f"After {dis}, the pc should be 0x{d.expected:08x}."
        return dis, expected, _observed(d.actual, cand_prev, _hex)

    assert d.field in REGISTER_FIELDS
    writes_field = (
        instr is not None
        and executed
        and instr.mnemonic not in COMPARES
        and instr.mnemonic in DATA_PROCESSING | {Mnemonic.LDR}
        and f"R{instr.rd}" == d.field
    )
    if writes_field:
        expected = f"{headline}{dis} should write 0x{d.expected:08x} to {d.field}."
    else:
        expected = f"After {dis}, {d.field} should hold 0x{d.expected:08x}."
    return dis, expected, _observed(d.actual, cand_prev, _hex)


def _summary(report: RunReport) -> str:
    if not report.discrepancies:
        return f"no divergence over {report.step_count} steps"
    first = report.discrepancies[0]
    return (
        f"{len(report.discrepancies)} discrepancies over {report.step_count} steps; "
        f"first at step {first.seq}: {first.field} ({first.category.value})"
    )


def feedback_entries(report: RunReport) -> list[FeedbackEntry]:
    views = step_views(
        report.reference_initial,
        report.candidate_initial,
        report.reference_trace,
        report.candidate_trace,
    )
    empty = StepView(None, None, None, None)
    entries = []
    for d in report.discrepancies:
        view = views[d.seq] if d.seq < len(views) else empty
        dis, expected, observed = _describe(d, view)
        entries.append(
            FeedbackEntry(
                seq=d.seq,
                pc=d.pc,
                disassembly=dis,
                field=d.field,
                category=d.category,
                expected=d.expected,
                actual=d.actual,
                expected_behavior=expected,
                observed_behavior=observed,
                area=classify(d, view, report.reference_initial, report.candidate_initial),
                program_digest=report.program_digest,
            )
        )
    return entries


def render_feedback(
    report: RunReport,
    score: Optional[FidelityScore] = None,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> FeedbackReport:
    """One entry per discrepancy, capped at ``limit`` with the overflow counted in ``truncated``."""
    entries = feedback_entries(report)
    return FeedbackReport(
        program_digests=[report.program_digest],
        entries=entries[:limit],
        total=len(entries),
        truncated=max(0, len(entries) - limit),
        summary=_summary(report),
        score=score,
    )


def merge_feedback(
    reports: Sequence[RunReport],
    score: Optional[FidelityScore] = None,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> FeedbackReport:
    """Feedback over a program set, entries in program order."""
    entries = [entry for report in reports for entry in feedback_entries(report)]
    diverged = sum(1 for r in reports if r.discrepancies)
    summary = (
        f"no divergence over {len(reports)} programs"
        if not entries
        else f"{len(entries)} discrepancies in {diverged} of {len(reports)} programs"
    )
    return FeedbackReport(
        program_digests=[r.program_digest for r in reports],
        entries=entries[:limit],
        total=len(entries),
        truncated=max(0, len(entries) - limit),
        summary=summary,
        score=score,
    )
