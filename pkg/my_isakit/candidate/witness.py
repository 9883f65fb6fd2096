# coding=utf-8
#
# witness.py
# 每个 knob 的最小见证程序：单独启用该 knob 时必然出现分歧
#

from ..isa.assembler import assemble_program
from ..isa.program import Program
from ..isa.types import MemoryImage
from .knobs import CATALOG, Knob

WITNESS_DATA_BASE = 0x100
# 见证程序都以 B . 结尾，预算足够覆盖到第一处分歧
WITNESS_BUDGET = 32

NEGATIVE_COMPARE = ("MOV R0, #10", "MOV R1, #20", "CMP R0, R1")

_WITNESS_SOURCE: dict[Knob, tuple[str, ...]] = {
    Knob.CMP_SKIPS_N_UPDATE: NEGATIVE_COMPARE,
    Knob.CARRY_INVERTED: ("MOV R0, #7", "CMP R0, R0"),
    Knob.OVERFLOW_ALWAYS_CLEAR: ("MOV R0, #0x80000000", "CMP R0, #1"),
    Knob.Z_FROM_LOW_BYTE_ONLY: ("MOV R0, #0x100", "CMP R0, #0"),
    Knob.PC_STEP_8: ("MOV R0, #1", "MOV R1, #2", "MOV R2, #3"),
    Knob.RESET_SKIPS_REGFILE: ("MOV R0, #1",),
    Knob.COND_EQ_NE_SWAPPED: ("MOV R0, #1", "CMP R0, #1", "MOVEQ R1, #5"),
    Knob.IMM_ROTATE_IGNORED: ("MOV R0, #0x100",),
    Knob.LDR_SIGN_EXTENDS_HALFWORD: (
        "MOV R7, #0x100",
        "MOV R0, #0x8000",
        "STR R0, [R7]",
        "LDR R1, [R7]",
    ),
    Knob.STR_WRITES_BIG_ENDIAN: ("MOV R7, #0x100", "MOV R0, #0x12", "STR R0, [R7]"),
    Knob.BRANCH_OFFSET_OFF_BY_4: ("B #+0", "MOV R0, #1", "MOV R1, #2"),
    Knob.FLAGS_UPDATED_ON_NON_S_OPS: ("MOV R0, #0",),
}


def _with_data_area(words: list[int], name: str) -> Program:
    image = bytearray(WITNESS_DATA_BASE + 16)
    for i, word in enumerate(words):
        image[4 * i : 4 * i + 4] = word.to_bytes(4, "little")
    return Program(MemoryImage(0, image), 0, name)


def negative_compare_program() -> Program:
    """MOV R0, #10; MOV R1, #20; CMP R0, R1 with nothing after it."""
    words = assemble_program(NEGATIVE_COMPARE)
    data = b"".join(w.to_bytes(4, "little") for w in words)
    return Program(MemoryImage(0, data), 0, "negative-compare")


def witness_program(knob: Knob) -> Program:
    """The knob's witness, followed by ``B .`` and a small data area."""
    words = assemble_program([*_WITNESS_SOURCE[knob], "B ."])
    return _with_data_area(words, f"witness-{knob.value}")


def witness_programs() -> list[Program]:
    return [witness_program(knob) for knob in CATALOG]
