# coding=utf-8
#
# decoder.py
# A32 子集的解码、编码与反汇编
#
# 支持的子集：
#   数据处理  MOV MVN ADD SUB RSB AND ORR EOR CMP CMN TST TEQ（立即数/寄存器形式，可选 S）
#   分支      B BL BX
#   访存      LDR/STR 字，立即数偏移（P=1, B=0, W=0）
#

import logging
from functools import lru_cache
from typing import Optional

from .alu import expand_imm, sign_extend
from .errors import UndefinedInstruction
from .types import (
    COMPARES,
    COND_AL,
    COND_NAMES,
    DP_OPCODES,
    MASK32,
    MOVES,
    DecodedInstr,
    Mnemonic,
)

logger = logging.getLogger(__name__)

_DP_BY_OPCODE = {code: mnemonic for mnemonic, code in DP_OPCODES.items()}

BX_PATTERN = 0x012FFF10
BX_MASK = 0x0FFFFFF0

# B . ，生成程序的结束循环
HALT_WORD = 0xEAFFFFFE


@lru_cache(maxsize=65536)
def decode(word: int) -> DecodedInstr:
    """
    Decode one instruction word of the supported subset.

    Args:
        word: 32-bit instruction word

    Returns:
        DecodedInstr whose re-encoding is ``word``

    Raises:
        UndefinedInstruction: word is outside the supported subset
    """
    word &= MASK32
    cond = word >> 28
    if cond == 0xF:
        raise UndefinedInstruction(word)

    if word & BX_MASK == BX_PATTERN:
        return DecodedInstr(Mnemonic.BX, cond, word, rm=word & 0xF)

    top = (word >> 25) & 0b111
    if top in (0b000, 0b001):
        return _decode_data_processing(word, cond)
    if top == 0b010:
        return _decode_load_store(word, cond)
    if top == 0b101:
        link = bool(word & (1 << 24))
        return DecodedInstr(
            Mnemonic.BL if link else Mnemonic.B,
            cond,
            word,
            offset=sign_extend((word & 0xFFFFFF) << 2, 26),
        )
    raise UndefinedInstruction(word)


def _decode_data_processing(word: int, cond: int) -> DecodedInstr:
    immediate = bool(word & (1 << 25))
    opcode = (word >> 21) & 0xF
    sets_flags = bool(word & (1 << 20))
    rn = (word >> 16) & 0xF
    rd = (word >> 12) & 0xF

    mnemonic = _DP_BY_OPCODE.get(opcode)
    if mnemonic is None:
        # ADC SBC RSC BIC 不在子集中
        raise UndefinedInstruction(word)
    if mnemonic in COMPARES and (not sets_flags or rd != 0):
        raise UndefinedInstruction(word)
    if mnemonic in MOVES and rn != 0:
        raise UndefinedInstruction(word)
    if sets_flags and rd == 15 and mnemonic not in COMPARES:
        # 带 S 写 PC 是异常返回，不支持
        raise UndefinedInstruction(word)

    if immediate:
        return DecodedInstr(
            mnemonic,
            cond,
            word,
            rd=rd,
            rn=rn,
            imm8=word & 0xFF,
            rotate=(word >> 8) & 0xF,
            sets_flags=sets_flags,
        )
    if (word >> 4) & 0xFF:
        # 移位寄存器操作数、乘法和杂项指令都不在子集中
        raise UndefinedInstruction(word)
    return DecodedInstr(
        mnemonic, cond, word, rd=rd, rn=rn, rm=word & 0xF, sets_flags=sets_flags
    )


def _decode_load_store(word: int, cond: int) -> DecodedInstr:
    pre_index = bool(word & (1 << 24))
    byte = bool(word & (1 << 22))
    write_back = bool(word & (1 << 21))
    if not pre_index or byte or write_back:
        raise UndefinedInstruction(word)
    load = bool(word & (1 << 20))
    return DecodedInstr(
        Mnemonic.LDR if load else Mnemonic.STR,
        cond,
        word,
        rd=(word >> 12) & 0xF,
        rn=(word >> 16) & 0xF,
        offset=word & 0xFFF,
        add_offset=bool(word & (1 << 23)),
    )


def encode(instr: DecodedInstr) -> int:
    """Inverse of ``decode`` on the supported subset."""
    word = (instr.cond & 0xF) << 28
    mnemonic = instr.mnemonic
    if mnemonic is Mnemonic.BX:
        return word | BX_PATTERN | (instr.rm or 0)
    if mnemonic in (Mnemonic.B, Mnemonic.BL):
        word |= 0b101 << 25
        if mnemonic is Mnemonic.BL:
            word |= 1 << 24
        return word | ((instr.offset >> 2) & 0xFFFFFF)
    if mnemonic in (Mnemonic.LDR, Mnemonic.STR):
        word |= (0b010 << 25) | (1 << 24)
        if instr.add_offset:
            word |= 1 << 23
        if mnemonic is Mnemonic.LDR:
            word |= 1 << 20
        return word | (instr.rn << 16) | (instr.rd << 12) | (instr.offset & 0xFFF)

    word |= DP_OPCODES[mnemonic] << 21
    if instr.sets_flags:
        word |= 1 << 20
    word |= (instr.rn << 16) | (instr.rd << 12)
    if instr.rm is None:
        return word | (1 << 25) | (instr.rotate << 8) | instr.imm8
    return word | instr.rm


def reg_name(index: int) -> str:
    return f"R{index}"


def _format_imm(value: int) -> str:
    return f"#{value}" if value < 256 else f"#0x{value:x}"


def disassemble(instr: DecodedInstr, pc: Optional[int] = None) -> str:
    """
    UAL-style text, e.g. ``CMP R0, R1`` or ``LDR R1, [R7, #4]``.

    Branch targets are absolute when pc is known, otherwise relative.
    """
    cond = "" if instr.cond == COND_AL else COND_NAMES[instr.cond]
    mnemonic = instr.mnemonic

    if mnemonic is Mnemonic.BX:
        return f"BX{cond} {reg_name(instr.rm or 0)}"
    if mnemonic in (Mnemonic.B, Mnemonic.BL):
        if pc is None:
            return f"{mnemonic.value}{cond} #{instr.offset:+d}"
        target = (pc + 8 + instr.offset) & MASK32
        return f"{mnemonic.value}{cond} 0x{target:08x}"
    if mnemonic in (Mnemonic.LDR, Mnemonic.STR):
        address = f"[{reg_name(instr.rn)}"
        if instr.offset or not instr.add_offset:
            sign = "" if instr.add_offset else "-"
            address += f", #{sign}{instr.offset}"
        return f"{mnemonic.value}{cond} {reg_name(instr.rd)}, {address}]"

    suffix = "S" if instr.sets_flags and mnemonic not in COMPARES else ""
    if instr.rm is None:
        value, _ = expand_imm(instr.imm8, instr.rotate, False)
        operand2 = _format_imm(value)
    else:
        operand2 = reg_name(instr.rm)
    if mnemonic in COMPARES:
        operands = [reg_name(instr.rn), operand2]
    elif mnemonic in MOVES:
        operands = [reg_name(instr.rd), operand2]
    else:
        operands = [reg_name(instr.rd), reg_name(instr.rn), operand2]
    return f"{mnemonic.value}{suffix}{cond} " + ", ".join(operands)


def disassemble_word(word: int, pc: Optional[int] = None) -> str:
    """Disassemble a raw word; words outside the subset render as ``.word``."""
    try:
        return disassemble(decode(word), pc)
    except UndefinedInstruction:
        return f".word 0x{word & MASK32:08x}"

