# coding=utf-8
#
# areas.py
# 分歧的语义区域分类，以及区域到候选 knob 的映射
#
# feedback 用它标注"疑似语义区域"，builtin synthesizer 用它选择要翻转的 knob。
#

from dataclasses import dataclass
from typing import Optional, Sequence

from ..candidate.knobs import Knob
from ..diff.types import FLAG_FIELDS, PC_FIELD, REGISTER_FIELDS, Discrepancy, DiscrepancyClass
from ..isa.decoder import decode
from ..isa.errors import IsaError
from ..isa.types import (
    ARITHMETIC,
    DATA_PROCESSING,
    PC,
    SUBTRACTIONS,
    ArchState,
    DecodedInstr,
    Mnemonic,
    TraceEvent,
)

CARRIED = "carried"

# 区域 → 候选 knob（按怀疑程度排序）
AREA_KNOBS: dict[str, tuple[Knob, ...]] = {
    "compare-n-flag": (Knob.CMP_SKIPS_N_UPDATE, Knob.IMM_ROTATE_IGNORED),
    "negative-flag": (Knob.IMM_ROTATE_IGNORED,),
    "zero-flag": (Knob.Z_FROM_LOW_BYTE_ONLY, Knob.IMM_ROTATE_IGNORED),
    "subtract-carry": (Knob.CARRY_INVERTED, Knob.IMM_ROTATE_IGNORED),
    "carry": (Knob.IMM_ROTATE_IGNORED, Knob.CARRY_INVERTED),
    "overflow": (Knob.OVERFLOW_ALWAYS_CLEAR, Knob.IMM_ROTATE_IGNORED),
    "flag-update": (Knob.FLAGS_UPDATED_ON_NON_S_OPS,),
    "pc-sequential": (Knob.PC_STEP_8,),
    "branch-target": (Knob.BRANCH_OFFSET_OFF_BY_4,),
    "condition": (Knob.COND_EQ_NE_SWAPPED,),
    "reset": (Knob.RESET_SKIPS_REGFILE,),
    "immediate-rotation": (Knob.IMM_ROTATE_IGNORED,),
    "load": (Knob.LDR_SIGN_EXTENDS_HALFWORD, Knob.STR_WRITES_BIG_ENDIAN),
    "store": (Knob.STR_WRITES_BIG_ENDIAN,),
    "register-result": (),
    "decode": (),
    CARRIED: (),
}


@dataclass(frozen=True)
class StepView:
    """What each side looked like going into one step."""

    ref_before: Optional[ArchState]
    cand_before: Optional[ArchState]
    ref_event: Optional[TraceEvent]
    cand_event: Optional[TraceEvent]

    @property
    def instr(self) -> Optional[DecodedInstr]:
        event = self.ref_event or self.cand_event
        if event is None:
            return None
        try:
            return decode(event.instr_word)
        except IsaError:
            return None


def states_before(initial: ArchState, trace: Sequence[TraceEvent]) -> list[ArchState]:
    """State entering each event, rebuilt from the initial state and the written registers."""
    regs = list(initial.regs)
    flags = initial.flags
    cycles = initial.cycle_count
    out = []
    for event in trace:
        regs[PC] = event.pc
        out.append(ArchState(regs=tuple(regs), flags=flags, cycle_count=cycles))
        for index, value in event.regs_written:
            regs[index] = value
        flags = event.flags
        cycles += event.cycles
    return out


def step_views(
    ref_initial: ArchState,
    cand_initial: ArchState,
    ref_trace: Sequence[TraceEvent],
    cand_trace: Sequence[TraceEvent],
) -> list[StepView]:
    ref_states = states_before(ref_initial, ref_trace)
    cand_states = states_before(cand_initial, cand_trace)
    n = max(len(ref_trace), len(cand_trace))

    def at(items, i):
        return items[i] if i < len(items) else None

    return [
        StepView(at(ref_states, i), at(cand_states, i), at(ref_trace, i), at(cand_trace, i))
        for i in range(n)
    ]


def field_value(state: ArchState, field: str) -> Optional[int]:
    if field in REGISTER_FIELDS:
        return state.regs[int(field[1:])]
    if field in FLAG_FIELDS:
        return int(state.flags.get(field))
    if field == PC_FIELD:
        return state.pc
    return None


def _flag_area(field: str, instr: DecodedInstr) -> str:
    if instr.mnemonic not in DATA_PROCESSING or not instr.sets_flags:
        return "flag-update"
    match field:
        case "N":
            return "compare-n-flag" if instr.mnemonic is Mnemonic.CMP else "negative-flag"
        case "Z":
            return "zero-flag"
        case "C":
            return "subtract-carry" if instr.mnemonic in SUBTRACTIONS else "carry"
        case _:
            return "overflow" if instr.mnemonic in ARITHMETIC else "flag-update"


def classify(d: Discrepancy, view: StepView, ref_initial: ArchState, cand_initial: ArchState) -> str:
    """Suspected semantic area of one discrepancy."""
    if d.category is DiscrepancyClass.DECODE_MISMATCH:
        return "decode"
    instr = view.instr
    if instr is None:
        return "decode"

    if d.category is DiscrepancyClass.MEMORY_MISMATCH:
        written = {
            addr for event in (view.ref_event, view.cand_event) if event for addr, _ in event.mem_writes
        }
        return "store" if d.address in written else CARRIED

    if view.ref_before is not None and view.cand_before is not None:
        ref_prev = field_value(view.ref_before, d.field)
        cand_prev = field_value(view.cand_before, d.field)
        if ref_prev is not None and ref_prev != cand_prev:
            initials_differ = field_value(ref_initial, d.field) != field_value(cand_initial, d.field)
            untouched = ref_prev == field_value(ref_initial, d.field) and cand_prev == field_value(
                cand_initial, d.field
            )
            if d.field in REGISTER_FIELDS and initials_differ and untouched:
                return "reset"
            return CARRIED

    if view.ref_event and view.cand_event and view.ref_event.executed != view.cand_event.executed:
        return "condition"

    match d.category:
        case DiscrepancyClass.FLAG_MISMATCH:
            return _flag_area(d.field, instr)
        case DiscrepancyClass.CONTROL_FLOW_MISMATCH:
            if instr.mnemonic in (Mnemonic.B, Mnemonic.BL):
                return "branch-target"
            return "pc-sequential"
        case _:
            if instr.mnemonic is Mnemonic.LDR:
                return "load"
            if instr.mnemonic in DATA_PROCESSING and instr.is_immediate and instr.rotate:
                return "immediate-rotation"
            return "register-result"


def knobs_for_area(area: str) -> tuple[Knob, ...]:
    return AREA_KNOBS.get(area, ())

