# coding=utf-8
#
# errors.py
# Architectural faults raised by the interpreter
#

from typing import Optional


class IsaError(Exception):
    """Base class for faults raised while decoding or executing an instruction.

    ``kind`` is a stable identifier used in traces, reports and RSP stop replies.
    ``pc`` is filled in by ``step`` once the faulting instruction address is known.
    """

    kind: str = "isa-error"

    def __init__(self, message: str, pc: Optional[int] = None):
        super().__init__(message)
        self.pc = pc

    def at(self, pc: int) -> "IsaError":
        """Tag the fault with the address of the faulting instruction."""
        if self.pc is None:
            self.pc = pc
        return self

    def __str__(self) -> str:
        base = super().__str__()
        if self.pc is None:
            return base
        return f"{base} (pc=0x{self.pc:08x})"


class UndefinedInstruction(IsaError):
    kind = "undefined-instruction"

    def __init__(self, word: int, pc: Optional[int] = None):
        super().__init__(f"undefined instruction 0x{word:08x}", pc)
        self.word = word


class InvalidCondition(IsaError):
    kind = "invalid-condition"

    def __init__(self, cond: int, pc: Optional[int] = None):
        super().__init__(f"condition 0x{cond:x} is outside the supported subset", pc)
        self.cond = cond


class UnalignedAccess(IsaError):
    kind = "unaligned-access"

    def __init__(self, addr: int, pc: Optional[int] = None):
        super().__init__(f"unaligned word access at 0x{addr:08x}", pc)
        self.addr = addr


class OutOfRangeAccess(IsaError):
    kind = "out-of-range-access"

    def __init__(self, addr: int, pc: Optional[int] = None):
        super().__init__(f"access outside memory image at 0x{addr:08x}", pc)
        self.addr = addr


FAULT_KINDS: dict[str, type[IsaError]] = {
    UndefinedInstruction.kind: UndefinedInstruction,
    InvalidCondition.kind: InvalidCondition,
    UnalignedAccess.kind: UnalignedAccess,
    OutOfRangeAccess.kind: OutOfRangeAccess,
}
