# coding=utf-8
#
# machine.py
# 可单步执行的机器：持有架构状态与内存映像，提交内存写入，提供 poke 接口
#

import logging
from typing import Optional

from .errors import UnalignedAccess
from .interpreter import Interpreter
from .program import Program
from .types import MASK32, NUM_REGS, ArchState, Flags, MemoryImage, StepResult

logger = logging.getLogger(__name__)


class Machine:
    """
    Single-owner steppable machine.

    All mutation happens through ``load``/``step`` and the ``poke_*`` methods; the
    RSP stub and the fault injector never touch ``state`` or ``memory`` directly.
    """

    def __init__(self, interpreter: Optional[Interpreter] = None):
        self.interpreter = interpreter or Interpreter()
        self.memory = MemoryImage()
        self.state: ArchState = self.interpreter.reset()
        self.seq = 0

    @property
    def name(self) -> str:
        return self.interpreter.name

    def load(self, program: Program) -> None:
        """Reset and install a copy of the program image, pc at the entry point."""
        self.memory = program.image.copy()
        self.state = self.interpreter.reset().with_pc(program.entry)
        self.seq = 0

    def reset(self) -> ArchState:
        self.state = self.interpreter.reset().with_pc(self.state.pc)
        self.seq = 0
        return self.state

    def step(self) -> StepResult:
        """
        Execute one instruction and commit its memory writes.

        Raises:
            IsaError: the instruction faulted; state and memory are unchanged
        """
        result = self.interpreter.step(self.state, self.memory, self.seq)
        for addr, value in result.mem_writes:
            self.memory.write_word(addr, value)
        self.state = result.state
        self.seq += 1
        return result

    def read_state(self) -> ArchState:
        return self.state

    def read_memory(self, addr: int, length: int) -> bytes:
        return self.memory.read_bytes(addr, length)

    def read_word(self, addr: int) -> int:
        return self.memory.read_word(addr)

    def poke_register(self, index: int, value: int) -> None:
        if not 0 <= index < NUM_REGS:
            raise IndexError(f"register index out of range: {index}")
        self.state = self.state.with_reg(index, value & MASK32)

    def poke_flags(self, flags: Flags) -> None:
        self.state = self.state.with_flags(flags)

    def poke_memory(self, addr: int, data: bytes) -> None:
        self.memory.write_bytes(addr, data)

    def poke_word(self, addr: int, value: int) -> None:
        if addr & 3:
            raise UnalignedAccess(addr)
        self.memory.write_word(addr, value)


class GoldenMachine(Machine):
    def __init__(self):
        super().__init__(Interpreter())
