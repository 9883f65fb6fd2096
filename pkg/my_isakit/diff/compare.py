# coding=utf-8
#
# compare.py
# 架构状态逐字段比较
#

from typing import Iterable, Optional

from ..isa.types import ArchState
from .types import (
    ALL_FIELDS,
    ERROR_CLASS_FIELD,
    FLAG_FIELDS,
    MEMORY_FIELD,
    PC_FIELD,
    REGISTER_FIELDS,
    Discrepancy,
    DiscrepancyClass,
    memory_field,
)


def compare_states(
    ref: ArchState,
    cand: ArchState,
    mask: Optional[Iterable[str]] = None,
    *,
    seq: int = 0,
    pc: int = 0,
    instr_word: int = 0,
) -> list[Discrepancy]:
    """
    One Discrepancy per differing masked field, in the order R0..R14, N, Z, C, V, pc.

    R15 is reported as the ``pc`` field (control_flow_mismatch). Flags are 0/1.

    Args:
        ref / cand: states sampled after the same step
        mask: field names to compare, all fields when None
        seq / pc / instr_word: step context stamped onto each discrepancy
    """
    fields = ALL_FIELDS if mask is None else frozenset(mask)
    out: list[Discrepancy] = []

    def emit(field: str, expected, actual, category: DiscrepancyClass):
        out.append(
            Discrepancy(
                seq=seq,
                pc=pc,
                instr_word=instr_word,
                field=field,
                expected=expected,
                actual=actual,
                category=category,
            )
        )

    for i, name in enumerate(REGISTER_FIELDS):
        if name in fields and ref.regs[i] != cand.regs[i]:
            emit(name, ref.regs[i], cand.regs[i], DiscrepancyClass.REGISTER_MISMATCH)
    for name in FLAG_FIELDS:
        expected, actual = ref.flags.get(name), cand.flags.get(name)
        if name in fields and expected != actual:
            emit(name, int(expected), int(actual), DiscrepancyClass.FLAG_MISMATCH)
    if PC_FIELD in fields and ref.pc != cand.pc:
        emit(PC_FIELD, ref.pc, cand.pc, DiscrepancyClass.CONTROL_FLOW_MISMATCH)
    return out


def compare_memory(
    ref_words: dict[int, int],
    cand_words: dict[int, int],
    mask: Optional[Iterable[str]] = None,
    *,
    seq: int = 0,
    pc: int = 0,
    instr_word: int = 0,
) -> list[Discrepancy]:
    """Compare words at the given addresses (the write-set union), ascending."""
    if mask is not None and MEMORY_FIELD not in frozenset(mask):
        return []
    out = []
    for addr in sorted(ref_words):
        expected, actual = ref_words[addr], cand_words[addr]
        if expected != actual:
            out.append(
                Discrepancy(
                    seq=seq,
                    pc=pc,
                    instr_word=instr_word,
                    field=memory_field(addr),
                    expected=expected,
                    actual=actual,
                    category=DiscrepancyClass.MEMORY_MISMATCH,
                )
            )
    return out


def fault_discrepancy(
    ref_kind: Optional[str],
    cand_kind: Optional[str],
    *,
    seq: int,
    pc: int,
    instr_word: int = 0,
) -> Discrepancy:
    """A fault raised by only one side, or by both with different kinds."""
    return Discrepancy(
        seq=seq,
        pc=pc,
        instr_word=instr_word,
        field=ERROR_CLASS_FIELD,
        expected=ref_kind or "none",
        actual=cand_kind or "none",
        category=DiscrepancyClass.DECODE_MISMATCH,
    )
