# coding=utf-8
#
# endpoints.py
# 锁步运行的两侧：可读状态、可单步、可写入（注入故障）的端点抽象
#
#   MachineEndpoint  进程内 Machine（黄金参考 / 候选模型）
#   RspEndpoint      通过 RSP 会话驱动的外部参考
#

import logging
from abc import ABC, abstractmethod
from dataclasses import replace
from typing import Optional

from ..candidate.config import CandidateConfig
from ..candidate.model import instantiate
from ..isa.alu import evaluate_condition
from ..isa.decoder import decode, disassemble
from ..isa.errors import FAULT_KINDS, IsaError, OutOfRangeAccess, UnalignedAccess, UndefinedInstruction
from ..isa.machine import GoldenMachine, Machine
from ..isa.program import Program
from ..isa.types import MASK32, ArchState, Flags, Mnemonic, TraceEvent, changed_registers
from ..rsp.errors import TargetError, UnexpectedReply
from ..rsp.layout import RegisterLayout
from ..rsp.session import SIGTRAP, RspSession
from ..rsp.stub import SIGNAL_FAULT_KINDS
from ..rsp.transcript import Transcript

logger = logging.getLogger(__name__)

# 每个 M/m 包传输的字节数
MEMORY_CHUNK = 512


def make_fault(kind: str, pc: int, word: int = 0) -> IsaError:
    """Rebuild a fault of the given kind, e.g. from an RSP stop signal."""
    cls = FAULT_KINDS.get(kind, UndefinedInstruction)
    if cls is UndefinedInstruction:
        return UndefinedInstruction(word, pc)
    if cls in (UnalignedAccess, OutOfRangeAccess):
        return cls(pc, pc)
    return cls(0, pc)


class Endpoint(ABC):
    """
    One side of a lockstep run.

    Memory words are cached per address: steps update the cache from their
    write events and pokes update it directly, so the engine never re-reads a
    word it already knows.
    """

    name: str = "endpoint"

    def __init__(self):
        self._words: dict[int, int] = {}

    @abstractmethod
    async def load(self, program: Program) -> None:
        """Install the program image and reset to its entry point."""

    @abstractmethod
    async def read_state(self) -> ArchState: ...

    @abstractmethod
    async def _step(self, seq: int) -> TraceEvent: ...

    @abstractmethod
    async def read_memory(self, addr: int, length: int) -> bytes: ...

    @abstractmethod
    async def poke_register(self, index: int, value: int) -> None: ...

    @abstractmethod
    async def poke_flags(self, flags: Flags) -> None: ...

    @abstractmethod
    async def _poke_word(self, addr: int, value: int) -> None: ...

    async def close(self) -> None:
        pass

    async def __aenter__(self):
        return self

    async def __aexit__(self, *exc) -> None:
        await self.close()

    async def step(self, seq: int) -> TraceEvent:
        """
        Raises:
            IsaError: the instruction faulted on this side
        """
        event = await self._step(seq)
        for addr, value in event.mem_writes:
            self._words[addr] = value
        return event

    async def read_image(self, base: int, size: int) -> bytes:
        return await self.read_memory(base, size)

    async def read_word(self, addr: int) -> int:
        if addr not in self._words:
            data = await self.read_memory(addr, 4)
            self._words[addr] = int.from_bytes(data, "little")
        return self._words[addr]

    async def poke_word(self, addr: int, value: int) -> None:
        if addr & 3:
            raise UnalignedAccess(addr)
        await self._poke_word(addr, value & MASK32)
        self._words[addr] = value & MASK32

    def _forget_memory(self) -> None:
        self._words.clear()


class MachineEndpoint(Endpoint):
    """In-process machine; the golden reference or a candidate model."""

    def __init__(self, machine: Machine, name: Optional[str] = None):
        super().__init__()
        self.machine = machine
        self.name = name or machine.name

    async def load(self, program: Program) -> None:
        self._forget_memory()
        self.machine.load(program)

    async def read_state(self) -> ArchState:
        return self.machine.read_state()

    async def _step(self, seq: int) -> TraceEvent:
        self.machine.seq = seq
        return self.machine.step().event

    async def read_memory(self, addr: int, length: int) -> bytes:
        return self.machine.read_memory(addr, length)

    async def poke_register(self, index: int, value: int) -> None:
        self.machine.poke_register(index, value)

    async def poke_flags(self, flags: Flags) -> None:
        self.machine.poke_flags(flags)

    async def _poke_word(self, addr: int, value: int) -> None:
        self.machine.poke_word(addr, value)


class GoldenEndpoint(MachineEndpoint):
    def __init__(self):
        super().__init__(GoldenMachine(), "golden")


class CandidateEndpoint(MachineEndpoint):
    def __init__(self, config: CandidateConfig):
        super().__init__(instantiate(config), "candidate")
        self.config = config


class RspEndpoint(Endpoint):
    """
    A reference reached over RSP.

    Each step costs: ``m pc,4`` (fetch for the trace text), ``s``, ``g``, plus an
    ``m`` read-back when a store executed. Cycles are counted as one per step.
    """

    name = "rsp"

    def __init__(self, session: RspSession, endpoint: str = ""):
        super().__init__()
        self.session = session
        self.endpoint = endpoint
        self._state: Optional[ArchState] = None

    @classmethod
    async def connect(
        cls,
        endpoint: str,
        layout: Optional[RegisterLayout] = None,
        timeout: float = 5.0,
        transcript: Optional[Transcript] = None,
    ) -> "RspEndpoint":
        session = await RspSession.connect(endpoint, layout, timeout, transcript)
        return cls(session, endpoint)

    async def close(self) -> None:
        await self.session.close()

    async def load(self, program: Program) -> None:
        """Write the image, then force a cold register file with pc at the entry."""
        self._forget_memory()
        image = program.image.snapshot()
        for offset in range(0, len(image), MEMORY_CHUNK):
            chunk = image[offset : offset + MEMORY_CHUNK]
            await self.session.write_memory(program.image.base + offset, chunk)
        state = ArchState().with_pc(program.entry)
        await self.session.write_registers(state)
        self._state = await self.session.read_registers(state)

    async def read_image(self, base: int, size: int) -> bytes:
        data = bytearray()
        for offset in range(0, size, MEMORY_CHUNK):
            length = min(MEMORY_CHUNK, size - offset)
            data.extend(await self.session.read_memory(base + offset, length))
        return bytes(data)

    async def read_state(self) -> ArchState:
        if self._state is None:
            self._state = await self.session.read_registers()
        return self._state

    async def _step(self, seq: int) -> TraceEvent:
        before = await self.read_state()
        pc = before.pc
        try:
            word = int.from_bytes(await self.session.read_memory(pc, 4), "little")
        except TargetError:
            word = None
        instr = None
        if word is not None:
            try:
                instr = decode(word)
            except IsaError:
                # the target may still fault on it; that is compared like any fault
                pass

        stop = await self.session.single_step()
        if stop.signal != SIGTRAP:
            kind = SIGNAL_FAULT_KINDS.get(stop.signal)
            if kind is None:
                raise UnexpectedReply("s", f"S{stop.signal:02x}".encode("ascii"))
            raise make_fault(kind, pc, word or 0)
        if word is None:
            raise UnexpectedReply("s", b"step succeeded at an unreadable pc")
        if instr is None:
            raise UnexpectedReply(
                "s", f"executed undecodable 0x{word:08x} at 0x{pc:08x}".encode("ascii")
            )

        after = await self.session.read_registers(before)
        after = replace(after, cycle_count=before.cycle_count + 1)
        self._state = after

        executed = evaluate_condition(before.flags, instr.cond)
        mem_writes: list[tuple[int, int]] = []
        if executed and instr.mnemonic is Mnemonic.STR:
            base = before.read_reg(instr.rn)
            addr = (base + instr.offset if instr.add_offset else base - instr.offset) & MASK32
            value = int.from_bytes(await self.session.read_memory(addr, 4), "little")
            mem_writes.append((addr, value))

        return TraceEvent(
            seq=seq,
            pc=pc,
            instr_word=word,
            disassembly=disassemble(instr, pc),
            executed=executed,
            regs_written=changed_registers(before, after),
            mem_writes=mem_writes,
            flags=after.flags,
            cycles=1,
            next_pc=after.pc,
        )

    async def read_memory(self, addr: int, length: int) -> bytes:
        return await self.session.read_memory(addr, length)

    async def poke_register(self, index: int, value: int) -> None:
        await self.session.write_register(self.session.layout.index_of_gpr(index), value)
        self._state = (await self.read_state()).with_reg(index, value)

    async def poke_flags(self, flags: Flags) -> None:
        state = await self.read_state()
        await self.session.write_register(
            self.session.layout.index_of_cpsr(), flags.to_cpsr()
        )
        self._state = state.with_flags(flags)

    async def _poke_word(self, addr: int, value: int) -> None:
        await self.session.write_memory(addr, value.to_bytes(4, "little"))
