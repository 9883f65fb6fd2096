# coding=utf-8
#
# assembler.py
# 子集的最小文本汇编器，接受 disassemble 输出的同一语法
#
#   MOV R0, #10        CMP R0, R1        ADDSEQ R2, R3, #0x100
#   LDR R1, [R7, #4]   STR R0, [R7]      B 0x00000010 / B #+0
#   BX R14 / BX LR
#

import re
from typing import Iterable

from .decoder import encode
from .types import (
    COMPARES,
    COND_AL,
    COND_NAMES,
    DP_OPCODES,
    MOVES,
    DecodedInstr,
    Mnemonic,
)

_REG_ALIASES = {"SP": 13, "LR": 14, "PC": 15}
_MNEMONICS = sorted((m.value for m in Mnemonic), key=len, reverse=True)
_MEM_RE = re.compile(r"^\[\s*(\w+)\s*(?:,\s*#(-?)(\w+)\s*)?\]$")


class AssemblyError(ValueError):
    pass


def _reg(token: str) -> int:
    token = token.strip().upper()
    if token in _REG_ALIASES:
        return _REG_ALIASES[token]
    if token.startswith("R") and token[1:].isdigit() and int(token[1:]) < 16:
        return int(token[1:])
    raise AssemblyError(f"not a register: {token!r}")


def _int(token: str) -> int:
    return int(token.strip(), 0)


def rotated_immediate(value: int) -> tuple[int, int]:
    """
    Returns:
        (imm8, rotate) with the smallest rotate that encodes value

    Raises:
        AssemblyError: value has no rotated 8-bit form
    """
    value &= 0xFFFFFFFF
    for rotate in range(16):
        amount = 2 * rotate
        imm = value if amount == 0 else ((value << amount) | (value >> (32 - amount))) & 0xFFFFFFFF
        if imm < 256:
            return imm, rotate
    raise AssemblyError(f"0x{value:x} is not encodable as a rotated immediate")


def _split_mnemonic(word: str) -> tuple[Mnemonic, bool, int]:
    word = word.upper()
    for name in _MNEMONICS:
        if not word.startswith(name):
            continue
        rest = word[len(name) :]
        sets_flags = False
        mnemonic = Mnemonic(name)
        if rest.startswith("S") and mnemonic in DP_OPCODES and mnemonic not in COMPARES:
            # MOVS 与 MOV + 条件 "S?" 不冲突：条件码不以 S 开头
            sets_flags, rest = True, rest[1:]
        if rest == "":
            return mnemonic, sets_flags, COND_AL
        if rest in COND_NAMES:
            return mnemonic, sets_flags, COND_NAMES.index(rest)
    raise AssemblyError(f"unknown mnemonic: {word!r}")


def parse_instruction(text: str, pc: int = 0) -> DecodedInstr:
    text = text.split(";", 1)[0].strip()
    if not text:
        raise AssemblyError("empty instruction")
    head, _, tail = text.partition(" ")
    mnemonic, sets_flags, cond = _split_mnemonic(head)
    tail = tail.strip()

    if mnemonic is Mnemonic.BX:
        return DecodedInstr(mnemonic, cond, 0, rm=_reg(tail))
    if mnemonic in (Mnemonic.B, Mnemonic.BL):
        if tail.startswith("#"):
            offset = _int(tail[1:])
        elif tail == ".":
            offset = -8
        else:
            offset = _int(tail) - (pc + 8)
        return DecodedInstr(mnemonic, cond, 0, offset=offset)
    if mnemonic in (Mnemonic.LDR, Mnemonic.STR):
        rd_text, _, address = tail.partition(",")
        match = _MEM_RE.match(address.strip())
        if not match:
            raise AssemblyError(f"bad address operand: {address.strip()!r}")
        base, minus, offset = match.groups()
        return DecodedInstr(
            mnemonic,
            cond,
            0,
            rd=_reg(rd_text),
            rn=_reg(base),
            offset=_int(offset) if offset else 0,
            add_offset=not minus,
        )

    operands = [op.strip() for op in tail.split(",")]
    if mnemonic in COMPARES:
        expected, rd = 2, 0
        rn = _reg(operands[0])
        sets_flags = True
    elif mnemonic in MOVES:
        expected, rn = 2, 0
        rd = _reg(operands[0])
    else:
        expected = 3
        rd, rn = _reg(operands[0]), _reg(operands[1])
    if len(operands) != expected:
        raise AssemblyError(f"{mnemonic.value} takes {expected} operands: {text!r}")
    operand2 = operands[-1]
    if operand2.startswith("#"):
        imm8, rotate = rotated_immediate(_int(operand2[1:]))
        return DecodedInstr(
            mnemonic, cond, 0, rd=rd, rn=rn, imm8=imm8, rotate=rotate, sets_flags=sets_flags
        )
    return DecodedInstr(mnemonic, cond, 0, rd=rd, rn=rn, rm=_reg(operand2), sets_flags=sets_flags)


def assemble(text: str, pc: int = 0) -> int:
    """Assemble one instruction to its 32-bit word."""
    return encode(parse_instruction(text, pc))


def assemble_program(lines: Iterable[str], base: int = 0) -> list[int]:
    """Assemble consecutive instructions starting at ``base``."""
    words = []
    for line in lines:
        if not line.split(";", 1)[0].strip():
            continue
        words.append(assemble(line, base + 4 * len(words)))
    return words
