# coding=utf-8
#
# isa 包
# A32 子集的黄金参考：类型、解码器、解释器、机器与程序加载
#

from .alu import (
    add_with_carry,
    alu_flags_sub,
    byte_swap,
    evaluate_condition,
    expand_imm,
    sign_extend,
    to_signed,
)
from .assembler import AssemblyError, assemble, assemble_program, rotated_immediate
from .decoder import HALT_WORD, decode, disassemble, disassemble_word, encode
from .errors import (
    FAULT_KINDS,
    InvalidCondition,
    IsaError,
    OutOfRangeAccess,
    UnalignedAccess,
    UndefinedInstruction,
)
from .interpreter import GOLDEN, Interpreter, execute, reset, step
from .machine import GoldenMachine, Machine
from .program import (
    GENERATOR_VERSION,
    Program,
    from_words,
    generate_program,
    generate_programs,
    load_binary,
    load_hex_listing,
    load_program,
    parse_hex_listing,
)
from .types import (
    ArchState,
    DecodedInstr,
    Flags,
    MemoryImage,
    Mnemonic,
    StepResult,
    TraceEvent,
)

__all__ = [
    "AssemblyError",
    "assemble",
    "assemble_program",
    "rotated_immediate",
    "add_with_carry",
    "alu_flags_sub",
    "byte_swap",
    "evaluate_condition",
    "expand_imm",
    "sign_extend",
    "to_signed",
    "HALT_WORD",
    "decode",
    "disassemble",
    "disassemble_word",
    "encode",
    "FAULT_KINDS",
    "InvalidCondition",
    "IsaError",
    "OutOfRangeAccess",
    "UnalignedAccess",
    "UndefinedInstruction",
    "GOLDEN",
    "Interpreter",
    "execute",
    "reset",
    "step",
    "GoldenMachine",
    "Machine",
    "GENERATOR_VERSION",
    "Program",
    "from_words",
    "generate_program",
    "generate_programs",
    "load_binary",
    "load_hex_listing",
    "load_program",
    "parse_hex_listing",
    "ArchState",
    "DecodedInstr",
    "Flags",
    "MemoryImage",
    "Mnemonic",
    "StepResult",
    "TraceEvent",
]
