# coding=utf-8
#
# alu.py
# A32 arithmetic helpers: AddWithCarry, rotated immediates, condition codes
#

from .errors import InvalidCondition
from .types import MASK32, Flags


def ror32(value: int, amount: int) -> int:
    amount &= 31
    value &= MASK32
    if amount == 0:
        return value
    return ((value >> amount) | (value << (32 - amount))) & MASK32


def sign_extend(value: int, bits: int) -> int:
    """Sign-extend the low ``bits`` of value to a 32-bit word."""
    sign = 1 << (bits - 1)
    value &= (1 << bits) - 1
    return ((value ^ sign) - sign) & MASK32


def to_signed(value: int) -> int:
    value &= MASK32
    return value - (1 << 32) if value & 0x80000000 else value


def byte_swap(value: int) -> int:
    return int.from_bytes((value & MASK32).to_bytes(4, "little"), "big")


def expand_imm(imm8: int, rotate: int, carry_in: bool) -> tuple[int, bool]:
    """
    Expand a rotated 8-bit immediate.

    Returns:
        (value, carry_out); carry_out is carry_in when rotate is 0
    """
    value = ror32(imm8 & 0xFF, 2 * (rotate & 0xF))
    if rotate == 0:
        return value, carry_in
    return value, bool(value & 0x80000000)


def add_with_carry(a: int, b: int, carry_in: bool) -> tuple[int, bool, bool]:
    """
    Returns:
        (result, carry_out, overflow)
    """
    a &= MASK32
    b &= MASK32
    unsigned_sum = a + b + int(carry_in)
    signed_sum = to_signed(a) + to_signed(b) + int(carry_in)
    result = unsigned_sum & MASK32
    carry = result != unsigned_sum
    overflow = to_signed(result) != signed_sum
    return result, carry, overflow


def nz_flags(result: int, base: Flags) -> Flags:
    return Flags(
        n=bool(result & 0x80000000),
        z=(result & MASK32) == 0,
        c=base.c,
        v=base.v,
    )


def alu_flags_sub(a: int, b: int) -> Flags:
    """NZCV of ``a - b`` exactly as CMP computes them."""
    result, carry, overflow = add_with_carry(a, ~b & MASK32, True)
    return Flags(
        n=bool(result & 0x80000000),
        z=result == 0,
        c=carry,
        v=overflow,
    )


def evaluate_condition(flags: Flags, cond: int) -> bool:
    """
    Args:
        flags: current NZCV
        cond: 4-bit condition field, 0x0..0xE

    Raises:
        InvalidCondition: cond is 0xF (unconditional space) or out of range
    """
    n, z, c, v = flags.n, flags.z, flags.c, flags.v
    match cond:
        case 0x0:
            return z
        case 0x1:
            return not z
        case 0x2:
            return c
        case 0x3:
            return not c
        case 0x4:
            return n
        case 0x5:
            return not n
        case 0x6:
            return v
        case 0x7:
            return not v
        case 0x8:
            return c and not z
        case 0x9:
            return not c or z
        case 0xA:
            return n == v
        case 0xB:
            return n != v
        case 0xC:
            return not z and n == v
        case 0xD:
            return z or n != v
        case 0xE:
            return True
    raise InvalidCondition(cond)
