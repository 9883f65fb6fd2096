# coding=utf-8
#
# knobs.py
# 语义缺陷开关目录
#
# 每个 knob 都是布尔开关，代表一类可复现的模型生成错误。
# 目录顺序即为修复时的决胜顺序。
#

from dataclasses import dataclass
from enum import Enum

from .errors import UnknownKnob


class Knob(str, Enum):
    CMP_SKIPS_N_UPDATE = "cmp_skips_n_update"
    CARRY_INVERTED = "carry_inverted"
    OVERFLOW_ALWAYS_CLEAR = "overflow_always_clear"
    Z_FROM_LOW_BYTE_ONLY = "z_from_low_byte_only"
    PC_STEP_8 = "pc_step_8"
    RESET_SKIPS_REGFILE = "reset_skips_regfile"
    COND_EQ_NE_SWAPPED = "cond_eq_ne_swapped"
    IMM_ROTATE_IGNORED = "imm_rotate_ignored"
    LDR_SIGN_EXTENDS_HALFWORD = "ldr_sign_extends_halfword"
    STR_WRITES_BIG_ENDIAN = "str_writes_big_endian"
    BRANCH_OFFSET_OFF_BY_4 = "branch_offset_off_by_4"
    FLAGS_UPDATED_ON_NON_S_OPS = "flags_updated_on_non_s_ops"

    def __str__(self) -> str:
        return self.value


CATALOG: tuple[Knob, ...] = tuple(Knob)


@dataclass(frozen=True)
class KnobInfo:
    knob: Knob
    scope: str
    # 单独启用时，第一处分歧的类别
    expected_class: str
    description: str


KNOB_INFO: dict[Knob, KnobInfo] = {
    info.knob: info
    for info in (
        KnobInfo(
            Knob.CMP_SKIPS_N_UPDATE,
            "CMP",
            "flag_mismatch",
            "CMP leaves N at its previous value",
        ),
        KnobInfo(
            Knob.CARRY_INVERTED,
            "SUB RSB CMP with S",
            "flag_mismatch",
            "subtractions report C as borrow instead of not-borrow",
        ),
        KnobInfo(
            Knob.OVERFLOW_ALWAYS_CLEAR,
            "ADD SUB RSB CMP CMN with S",
            "flag_mismatch",
            "arithmetic never sets V",
        ),
        KnobInfo(
            Knob.Z_FROM_LOW_BYTE_ONLY,
            "flag-setting data processing",
            "flag_mismatch",
            "Z tests only the low byte of the result",
        ),
        KnobInfo(
            Knob.PC_STEP_8,
            "every sequential instruction",
            "control_flow_mismatch",
            "sequential execution advances pc by 8",
        ),
        KnobInfo(
            Knob.RESET_SKIPS_REGFILE,
            "reset",
            "register_mismatch",
            "reset does not clear R0-R14, they keep their power-on contents",
        ),
        KnobInfo(
            Knob.COND_EQ_NE_SWAPPED,
            "EQ/NE conditional instructions",
            "register_mismatch",
            "EQ and NE conditions are swapped",
        ),
        KnobInfo(
            Knob.IMM_ROTATE_IGNORED,
            "data processing with a rotated immediate",
            "register_mismatch",
            "the rotate field of immediates is ignored",
        ),
        KnobInfo(
            Knob.LDR_SIGN_EXTENDS_HALFWORD,
            "LDR",
            "register_mismatch",
            "LDR returns the sign-extended low halfword",
        ),
        KnobInfo(
            Knob.STR_WRITES_BIG_ENDIAN,
            "STR",
            "memory_mismatch",
            "STR stores the word byte-swapped",
        ),
        KnobInfo(
            Knob.BRANCH_OFFSET_OFF_BY_4,
            "B BL",
            "control_flow_mismatch",
            "branch target uses pc+4 instead of pc+8",
        ),
        KnobInfo(
            Knob.FLAGS_UPDATED_ON_NON_S_OPS,
            "data processing without S",
            "flag_mismatch",
            "flags are updated even when S is clear",
        ),
    )
}


def knob_from_name(name: str | Knob) -> Knob:
    """
    Raises:
        UnknownKnob: name is not in the catalog
    """
    if isinstance(name, Knob):
        return name
    try:
        return Knob(name)
    except ValueError:
        raise UnknownKnob(name) from None


def catalog_order(knobs) -> list[Knob]:
    return sorted(knobs, key=CATALOG.index)
