# coding=utf-8
#
# types.py
# 架构状态、指令与内存映像的统一类型定义
#

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict

from .errors import OutOfRangeAccess, UnalignedAccess

MASK32 = 0xFFFFFFFF
NUM_REGS = 16
PC = 15
LR = 14

# cpsr 中 NZCV 的位置
CPSR_N = 1 << 31
CPSR_Z = 1 << 30
CPSR_C = 1 << 29
CPSR_V = 1 << 28
# user mode, ARM state
CPSR_USER_MODE = 0x10


class Mnemonic(str, Enum):
    AND = "AND"
    EOR = "EOR"
    SUB = "SUB"
    RSB = "RSB"
    ADD = "ADD"
    TST = "TST"
    TEQ = "TEQ"
    CMP = "CMP"
    CMN = "CMN"
    ORR = "ORR"
    MOV = "MOV"
    MVN = "MVN"
    B = "B"
    BL = "BL"
    BX = "BX"
    LDR = "LDR"
    STR = "STR"


# 数据处理指令的 opcode 字段（bits 24..21）
DP_OPCODES: dict[Mnemonic, int] = {
    Mnemonic.AND: 0b0000,
    Mnemonic.EOR: 0b0001,
    Mnemonic.SUB: 0b0010,
    Mnemonic.RSB: 0b0011,
    Mnemonic.ADD: 0b0100,
    Mnemonic.TST: 0b1000,
    Mnemonic.TEQ: 0b1001,
    Mnemonic.CMP: 0b1010,
    Mnemonic.CMN: 0b1011,
    Mnemonic.ORR: 0b1100,
    Mnemonic.MOV: 0b1101,
    Mnemonic.MVN: 0b1111,
}
DATA_PROCESSING = frozenset(DP_OPCODES)
COMPARES = frozenset({Mnemonic.TST, Mnemonic.TEQ, Mnemonic.CMP, Mnemonic.CMN})
ARITHMETIC = frozenset(
    {Mnemonic.ADD, Mnemonic.SUB, Mnemonic.RSB, Mnemonic.CMP, Mnemonic.CMN}
)
SUBTRACTIONS = frozenset({Mnemonic.SUB, Mnemonic.RSB, Mnemonic.CMP})
MOVES = frozenset({Mnemonic.MOV, Mnemonic.MVN})
BRANCHES = frozenset({Mnemonic.B, Mnemonic.BL, Mnemonic.BX})
MEMORY_OPS = frozenset({Mnemonic.LDR, Mnemonic.STR})

COND_NAMES = (
    "EQ", "NE", "CS", "CC", "MI", "PL", "VS", "VC",
    "HI", "LS", "GE", "LT", "GT", "LE", "AL",
)  # fmt: skip
COND_EQ = 0x0
COND_NE = 0x1
COND_GE = 0xA
COND_AL = 0xE


@dataclass(frozen=True)
class Flags:
    """NZCV condition flags"""

    n: bool = False
    z: bool = False
    c: bool = False
    v: bool = False

    def to_cpsr(self, base: int = CPSR_USER_MODE) -> int:
        value = base & 0x0FFFFFFF
        if self.n:
            value |= CPSR_N
        if self.z:
            value |= CPSR_Z
        if self.c:
            value |= CPSR_C
        if self.v:
            value |= CPSR_V
        return value

    @classmethod
    def from_cpsr(cls, cpsr: int) -> "Flags":
        return cls(
            n=bool(cpsr & CPSR_N),
            z=bool(cpsr & CPSR_Z),
            c=bool(cpsr & CPSR_C),
            v=bool(cpsr & CPSR_V),
        )

    def get(self, name: str) -> bool:
        return getattr(self, name.lower())

    def with_flag(self, name: str, value: bool) -> "Flags":
        return replace(self, **{name.lower(): value})


@dataclass(frozen=True)
class ArchState:
    """
    CPU 的完整可观测架构状态

    regs[15] 保存当前指令地址；作为操作数读取 R15 时得到 pc + 8。
    """

    regs: tuple[int, ...] = (0,) * NUM_REGS
    flags: Flags = field(default_factory=Flags)
    cycle_count: int = 0

    def __post_init__(self):
        if len(self.regs) != NUM_REGS:
            raise ValueError(f"ArchState needs {NUM_REGS} registers, got {len(self.regs)}")

    @property
    def pc(self) -> int:
        return self.regs[PC]

    def read_reg(self, index: int) -> int:
        """Operand read of a register, applying the A32 pipeline offset for R15."""
        if index == PC:
            return (self.regs[PC] + 8) & MASK32
        return self.regs[index]

    def with_reg(self, index: int, value: int) -> "ArchState":
        regs = list(self.regs)
        regs[index] = value & MASK32
        return replace(self, regs=tuple(regs))

    def with_pc(self, pc: int) -> "ArchState":
        return self.with_reg(PC, pc)

    def with_flags(self, flags: Flags) -> "ArchState":
        return replace(self, flags=flags)


@dataclass(frozen=True)
class DecodedInstr:
    """
    解码后的指令

    数据处理指令：rm 为 None 时第二操作数是循环移位的 8 位立即数 (imm8, rotate)。
    B/BL：offset 为带符号的字节偏移。
    LDR/STR：offset 为 12 位无符号立即数，add_offset 对应 U 位。
    BX：rm 为目标寄存器。
    """

    mnemonic: Mnemonic
    cond: int
    raw_word: int
    rd: int = 0
    rn: int = 0
    rm: Optional[int] = None
    imm8: int = 0
    rotate: int = 0
    offset: int = 0
    add_offset: bool = True
    sets_flags: bool = False

    @property
    def is_immediate(self) -> bool:
        return self.mnemonic in DATA_PROCESSING and self.rm is None

    @property
    def writes_rd(self) -> bool:
        return (
            self.mnemonic in DATA_PROCESSING and self.mnemonic not in COMPARES
        ) or self.mnemonic is Mnemonic.LDR

    @property
    def is_branch(self) -> bool:
        return self.mnemonic in BRANCHES or (self.writes_rd and self.rd == PC)


class MemoryImage:
    """
    扁平的小端内存映像

    字访问必须 4 字节对齐，并且 [addr, addr+4) 必须完全落在映像内。
    解释器从不修改映像；写操作由持有映像的机器统一提交。
    """

    def __init__(self, base: int = 0, data: bytes | bytearray = b""):
        if not 0 <= base <= MASK32:
            raise ValueError(f"base address out of range: {base:#x}")
        self.base = base
        self._data = bytearray(data)

    @property
    def size(self) -> int:
        return len(self._data)

    @property
    def end(self) -> int:
        return self.base + len(self._data)

    def contains(self, addr: int, length: int = 1) -> bool:
        return self.base <= addr and addr + length <= self.end

    def check_word(self, addr: int) -> None:
        if addr & 3:
            raise UnalignedAccess(addr)
        if not self.contains(addr, 4):
            raise OutOfRangeAccess(addr)

    def read_word(self, addr: int) -> int:
        self.check_word(addr)
        offset = addr - self.base
        return int.from_bytes(self._data[offset : offset + 4], "little")

    def write_word(self, addr: int, value: int) -> None:
        self.check_word(addr)
        offset = addr - self.base
        self._data[offset : offset + 4] = (value & MASK32).to_bytes(4, "little")

    def read_bytes(self, addr: int, length: int) -> bytes:
        if not self.contains(addr, length):
            raise OutOfRangeAccess(addr)
        offset = addr - self.base
        return bytes(self._data[offset : offset + length])

    def write_bytes(self, addr: int, data: bytes) -> None:
        if not self.contains(addr, len(data)):
            raise OutOfRangeAccess(addr)
        offset = addr - self.base
        self._data[offset : offset + len(data)] = data

    def snapshot(self) -> bytes:
        return bytes(self._data)

    def copy(self) -> "MemoryImage":
        return MemoryImage(self.base, self._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MemoryImage):
            return NotImplemented
        return self.base == other.base and self._data == other._data

    def __repr__(self) -> str:
        return f"MemoryImage(base=0x{self.base:08x}, size={self.size})"


class TraceEvent(BaseModel):
    """One executed (or condition-failed) instruction as seen by an observer."""

    model_config = ConfigDict(frozen=True)

    seq: int
    pc: int
    instr_word: int
    disassembly: str
    executed: bool = True
    regs_written: list[tuple[int, int]] = []
    mem_writes: list[tuple[int, int]] = []
    flags: Flags = Flags()
    cycles: int = 1
    next_pc: int = 0


@dataclass(frozen=True)
class StepResult:
    state: ArchState
    event: TraceEvent

    @property
    def mem_writes(self) -> list[tuple[int, int]]:
        return self.event.mem_writes


def changed_registers(before: ArchState, after: ArchState) -> list[tuple[int, int]]:
    """R0..R14 whose value differs between two states, in index order."""
    return [
        (i, after.regs[i]) for i in range(PC) if before.regs[i] != after.regs[i]
    ]
