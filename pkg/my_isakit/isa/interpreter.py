# coding=utf-8
#
# interpreter.py
# 黄金参考解释器
#
# Interpreter 是纯函数式的：execute/step 不修改传入的状态和内存，
# 内存写入以 mem_writes 的形式返回，由持有内存的 Machine 提交。
# 各个 hook 方法是候选模型（candidate）注入语义缺陷的唯一位置。
#

import logging
from dataclasses import dataclass

from .alu import add_with_carry, evaluate_condition, expand_imm
from .decoder import decode, disassemble
from .errors import IsaError
from .types import (
    ARITHMETIC,
    COMPARES,
    LR,
    MASK32,
    PC,
    ArchState,
    DecodedInstr,
    Flags,
    MemoryImage,
    Mnemonic,
    StepResult,
    TraceEvent,
    changed_registers,
)

logger = logging.getLogger(__name__)


@dataclass
class _Effect:
    regs: list[int]
    flags: Flags
    next_pc: int
    mem_writes: list[tuple[int, int]]


class Interpreter:
    """A32 subset interpreter with golden semantics."""

    name = "golden"

    # ---- hooks -------------------------------------------------------------

    def reset(self) -> ArchState:
        return ArchState()

    def condition_passed(self, flags: Flags, cond: int) -> bool:
        return evaluate_condition(flags, cond)

    def sequential_pc(self, pc: int) -> int:
        return (pc + 4) & MASK32

    def expand_immediate(self, instr: DecodedInstr, carry_in: bool) -> tuple[int, bool]:
        return expand_imm(instr.imm8, instr.rotate, carry_in)

    def branch_target(self, pc: int, offset: int) -> int:
        return (pc + 8 + offset) & MASK32

    def load_word(self, mem: MemoryImage, addr: int) -> int:
        return mem.read_word(addr)

    def store_word_value(self, value: int) -> int:
        return value

    def updates_flags(self, instr: DecodedInstr) -> bool:
        return instr.sets_flags

    def flag_result(
        self, instr: DecodedInstr, result: int, before: Flags, computed: Flags
    ) -> Flags:
        return computed

    def cycles(self, instr: DecodedInstr) -> int:
        return 1

    # ---- execution ---------------------------------------------------------

    def step(self, state: ArchState, mem: MemoryImage, seq: int = 0) -> StepResult:
        """
        Fetch, decode and execute the instruction at R15.

        Raises:
            IsaError: any decode/execute fault, tagged with the faulting pc
        """
        pc = state.pc
        try:
            word = mem.read_word(pc)
            return self.execute(state, mem, decode(word), seq)
        except IsaError as exc:
            raise exc.at(pc)

    def execute(
        self, state: ArchState, mem: MemoryImage, instr: DecodedInstr, seq: int = 0
    ) -> StepResult:
        pc = state.pc
        try:
            passed = self.condition_passed(state.flags, instr.cond)
            if not passed:
                effect = _Effect(list(state.regs), state.flags, self.sequential_pc(pc), [])
            elif instr.mnemonic is Mnemonic.BX:
                effect = _Effect(list(state.regs), state.flags, state.read_reg(instr.rm), [])
            elif instr.mnemonic in (Mnemonic.B, Mnemonic.BL):
                effect = self._execute_branch(state, instr)
            elif instr.mnemonic in (Mnemonic.LDR, Mnemonic.STR):
                effect = self._execute_load_store(state, mem, instr)
            else:
                effect = self._execute_data_processing(state, instr)
        except IsaError as exc:
            raise exc.at(pc)

        cycles = self.cycles(instr)
        effect.regs[PC] = effect.next_pc & MASK32
        next_state = ArchState(
            regs=tuple(effect.regs),
            flags=effect.flags,
            cycle_count=state.cycle_count + cycles,
        )
        event = TraceEvent(
            seq=seq,
            pc=pc,
            instr_word=instr.raw_word,
            disassembly=disassemble(instr, pc),
            executed=passed,
            regs_written=changed_registers(state, next_state),
            mem_writes=effect.mem_writes,
            flags=effect.flags,
            cycles=cycles,
            next_pc=next_state.pc,
        )
        return StepResult(next_state, event)

    def _execute_branch(self, state: ArchState, instr: DecodedInstr) -> _Effect:
        regs = list(state.regs)
        if instr.mnemonic is Mnemonic.BL:
            regs[LR] = (state.pc + 4) & MASK32
        return _Effect(regs, state.flags, self.branch_target(state.pc, instr.offset), [])

    def _address(self, state: ArchState, instr: DecodedInstr) -> int:
        base = state.read_reg(instr.rn)
        if instr.add_offset:
            return (base + instr.offset) & MASK32
        return (base - instr.offset) & MASK32

    def _execute_load_store(
        self, state: ArchState, mem: MemoryImage, instr: DecodedInstr
    ) -> _Effect:
        regs = list(state.regs)
        addr = self._address(state, instr)
        next_pc = self.sequential_pc(state.pc)
        if instr.mnemonic is Mnemonic.LDR:
            value = self.load_word(mem, addr) & MASK32
            if instr.rd == PC:
                next_pc = value
            else:
                regs[instr.rd] = value
            return _Effect(regs, state.flags, next_pc, [])

        mem.check_word(addr)
        value = self.store_word_value(state.read_reg(instr.rd)) & MASK32
        return _Effect(regs, state.flags, next_pc, [(addr, value)])

    def _execute_data_processing(self, state: ArchState, instr: DecodedInstr) -> _Effect:
        before = state.flags
        a = state.read_reg(instr.rn)
        if instr.rm is None:
            b, shifter_carry = self.expand_immediate(instr, before.c)
        else:
            b, shifter_carry = state.read_reg(instr.rm), before.c

        carry, overflow = shifter_carry, before.v
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
                result = ~b & MASK32
            case Mnemonic.ADD | Mnemonic.CMN:
                result, carry, overflow = add_with_carry(a, b, False)
            case Mnemonic.SUB | Mnemonic.CMP:
                result, carry, overflow = add_with_carry(a, ~b & MASK32, True)
            case Mnemonic.RSB:
                result, carry, overflow = add_with_carry(b, ~a & MASK32, True)
            case _:
                raise AssertionError(f"not a data-processing instruction: {instr}")

        flags = before
        if self.updates_flags(instr):
            computed = Flags(
                n=bool(result & 0x80000000),
                z=result == 0,
                c=carry,
                v=overflow if instr.mnemonic in ARITHMETIC else before.v,
            )
            flags = self.flag_result(instr, result, before, computed)

        regs = list(state.regs)
        next_pc = self.sequential_pc(state.pc)
        if instr.mnemonic not in COMPARES:
            if instr.rd == PC:
                next_pc = result
            else:
                regs[instr.rd] = result
        return _Effect(regs, flags, next_pc, [])


GOLDEN = Interpreter()


def execute(
    state: ArchState, mem: MemoryImage, instr: DecodedInstr, seq: int = 0
) -> StepResult:
    return GOLDEN.execute(state, mem, instr, seq)


def step(state: ArchState, mem: MemoryImage, seq: int = 0) -> StepResult:
    return GOLDEN.step(state, mem, seq)


def reset() -> ArchState:
    """Cold state: all registers zero, flags clear, no cycles."""
    return GOLDEN.reset()
