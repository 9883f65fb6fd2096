# coding=utf-8
#
# model.py
# 候选 CPU 模型：在黄金解释器的 hook 上逐点注入 knob 语义
#

import logging
from dataclasses import replace
from typing import Iterable

from ..isa.alu import byte_swap, sign_extend
from ..isa.interpreter import Interpreter
from ..isa.machine import Machine
from ..isa.types import (
    ARITHMETIC,
    COND_EQ,
    COND_NE,
    DATA_PROCESSING,
    MASK32,
    NUM_REGS,
    PC,
    SUBTRACTIONS,
    ArchState,
    DecodedInstr,
    Flags,
    MemoryImage,
    Mnemonic,
    StepResult,
)
from .config import CandidateConfig
from .knobs import Knob

logger = logging.getLogger(__name__)


def power_on_registers() -> tuple[int, ...]:
    """Register contents before any reset clears them."""
    regs = [0xA5A50000 | i for i in range(NUM_REGS)]
    regs[PC] = 0
    return tuple(regs)


class CandidateInterpreter(Interpreter):
    """Golden semantics with each active knob overriding exactly one hook."""

    name = "candidate"

    def __init__(self, knobs: Iterable[Knob] = ()):
        self.knobs = frozenset(knobs)

    def __contains__(self, knob: Knob) -> bool:
        return knob in self.knobs

    def reset(self) -> ArchState:
        state = super().reset()
        if Knob.RESET_SKIPS_REGFILE in self:
            return replace(state, regs=power_on_registers())
        return state

    def condition_passed(self, flags: Flags, cond: int) -> bool:
        if Knob.COND_EQ_NE_SWAPPED in self and cond in (COND_EQ, COND_NE):
            cond ^= 1
        return super().condition_passed(flags, cond)

    def sequential_pc(self, pc: int) -> int:
        if Knob.PC_STEP_8 in self:
            return (pc + 8) & MASK32
        return super().sequential_pc(pc)

    def expand_immediate(self, instr: DecodedInstr, carry_in: bool) -> tuple[int, bool]:
        if Knob.IMM_ROTATE_IGNORED in self:
            return instr.imm8, carry_in
        return super().expand_immediate(instr, carry_in)

    def branch_target(self, pc: int, offset: int) -> int:
        if Knob.BRANCH_OFFSET_OFF_BY_4 in self:
            return (pc + 4 + offset) & MASK32
        return super().branch_target(pc, offset)

    def load_word(self, mem: MemoryImage, addr: int) -> int:
        value = super().load_word(mem, addr)
        if Knob.LDR_SIGN_EXTENDS_HALFWORD in self:
            return sign_extend(value & 0xFFFF, 16)
        return value

    def store_word_value(self, value: int) -> int:
        if Knob.STR_WRITES_BIG_ENDIAN in self:
            return byte_swap(value)
        return super().store_word_value(value)

    def updates_flags(self, instr: DecodedInstr) -> bool:
        if Knob.FLAGS_UPDATED_ON_NON_S_OPS in self and instr.mnemonic in DATA_PROCESSING:
            return True
        return super().updates_flags(instr)

    def flag_result(
        self, instr: DecodedInstr, result: int, before: Flags, computed: Flags
    ) -> Flags:
        flags = super().flag_result(instr, result, before, computed)
        if Knob.CMP_SKIPS_N_UPDATE in self and instr.mnemonic is Mnemonic.CMP:
            flags = replace(flags, n=before.n)
        if Knob.CARRY_INVERTED in self and instr.mnemonic in SUBTRACTIONS:
            flags = replace(flags, c=not flags.c)
        if Knob.OVERFLOW_ALWAYS_CLEAR in self and instr.mnemonic in ARITHMETIC:
            flags = replace(flags, v=False)
        if Knob.Z_FROM_LOW_BYTE_ONLY in self:
            flags = replace(flags, z=(result & 0xFF) == 0)
        return flags


class CandidateModel(Machine):
    """A steppable candidate machine built from a CandidateConfig."""

    def __init__(self, config: CandidateConfig):
        super().__init__(CandidateInterpreter(config.active_knobs))
        self.config = config

    def __repr__(self) -> str:
        return f"CandidateModel({self.config.label()}, v{self.config.version})"


def instantiate(config: CandidateConfig | Iterable[str]) -> CandidateModel:
    """
    Build a candidate model starting from its reset state.

    Raises:
        UnknownKnob: a knob name is not in the catalog
    """
    if not isinstance(config, CandidateConfig):
        config = CandidateConfig.from_names(config)
    logger.debug(f"Instantiating candidate {config.label()} v{config.version}")
    return CandidateModel(config)


def candidate_step(model: CandidateModel) -> StepResult:
    return model.step()
