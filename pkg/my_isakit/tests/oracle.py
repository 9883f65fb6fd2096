# coding=utf-8
#
# oracle.py
# 表驱动的独立 A32 子集实现，仅用于交叉核对黄金解释器
#
# 直接按位域解码，标志位用无界整数运算得到，不复用 my_isakit 的任何代码。
#

MASK = 0xFFFFFFFF
INT_MIN = -(1 << 31)
INT_MAX = (1 << 31) - 1


class OracleFault(Exception):
    def __init__(self, kind: str):
        super().__init__(kind)
        self.kind = kind


def _signed(x: int) -> int:
    return x - (1 << 32) if x & 0x80000000 else x


def _overflows(value: int) -> bool:
    return not INT_MIN <= value <= INT_MAX


def _add(a: int, b: int):
    return (a + b) & MASK, a + b > MASK, _overflows(_signed(a) + _signed(b))


def _sub(a: int, b: int):
    return (a - b) & MASK, a >= b, _overflows(_signed(a) - _signed(b))


def _logic(op):
    return lambda a, b: (op(a, b) & MASK, None, None)


CONDITIONS = {
    0x0: lambda n, z, c, v: z,
    0x1: lambda n, z, c, v: not z,
    0x2: lambda n, z, c, v: c,
    0x3: lambda n, z, c, v: not c,
    0x4: lambda n, z, c, v: n,
    0x5: lambda n, z, c, v: not n,
    0x6: lambda n, z, c, v: v,
    0x7: lambda n, z, c, v: not v,
    0x8: lambda n, z, c, v: c and not z,
    0x9: lambda n, z, c, v: not c or z,
    0xA: lambda n, z, c, v: n == v,
    0xB: lambda n, z, c, v: n != v,
    0xC: lambda n, z, c, v: not z and n == v,
    0xD: lambda n, z, c, v: z or n != v,
    0xE: lambda n, z, c, v: True,
}

# opcode -> (writes Rd, fn(a, b) -> (result, carry or None, overflow or None))
DATA_PROCESSING = {
    0x0: (True, _logic(lambda a, b: a & b)),
    0x1: (True, _logic(lambda a, b: a ^ b)),
    0x2: (True, _sub),
    0x3: (True, lambda a, b: _sub(b, a)),
    0x4: (True, _add),
    0x8: (False, _logic(lambda a, b: a & b)),
    0x9: (False, _logic(lambda a, b: a ^ b)),
    0xA: (False, _sub),
    0xB: (False, _add),
    0xC: (True, _logic(lambda a, b: a | b)),
    0xD: (True, _logic(lambda a, b: b)),
    0xF: (True, _logic(lambda a, b: ~b)),
}


class OracleCpu:
    def __init__(self, image: bytes, base: int = 0, entry: int = 0):
        self.mem = bytearray(image)
        self.base = base
        self.regs = [0] * 16
        self.regs[15] = entry
        self.n = self.z = self.c = self.v = False

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return self.n, self.z, self.c, self.v

    def _check(self, addr: int) -> int:
        if addr % 4:
            raise OracleFault("unaligned-access")
        offset = addr - self.base
        if offset < 0 or offset + 4 > len(self.mem):
            raise OracleFault("out-of-range-access")
        return offset

    def load(self, addr: int) -> int:
        offset = self._check(addr)
        return int.from_bytes(self.mem[offset : offset + 4], "little")

    def store(self, addr: int, value: int) -> None:
        offset = self._check(addr)
        self.mem[offset : offset + 4] = value.to_bytes(4, "little")

    def operand(self, index: int) -> int:
        return (self.regs[15] + 8) & MASK if index == 15 else self.regs[index]

    def step(self) -> None:
        pc = self.regs[15]
        word = self.load(pc)
        cond = word >> 28
        if cond == 0xF:
            raise OracleFault("undefined-instruction")
        next_pc = (pc + 4) & MASK
        if not CONDITIONS[cond](*self.flags):
            self.regs[15] = next_pc
            return

        if word & 0x0FFFFFF0 == 0x012FFF10:
            self.regs[15] = self.operand(word & 0xF)
            return

        group = (word >> 25) & 0b111
        if group == 0b101:
            offset = word & 0xFFFFFF
            if offset & 0x800000:
                offset -= 1 << 24
            if word & (1 << 24):
                self.regs[14] = next_pc
            self.regs[15] = (pc + 8 + 4 * offset) & MASK
            return

        rn = (word >> 16) & 0xF
        rd = (word >> 12) & 0xF
        if group == 0b010:
            offset = word & 0xFFF
            addr = self.operand(rn) + offset if word & (1 << 23) else self.operand(rn) - offset
            addr &= MASK
            if word & (1 << 20):
                value = self.load(addr)
                if rd == 15:
                    next_pc = value
                else:
                    self.regs[rd] = value
            else:
                self.store(addr, self.operand(rd))
            self.regs[15] = next_pc
            return

        if group == 0b001:
            imm8, amount = word & 0xFF, 2 * ((word >> 8) & 0xF)
            b = ((imm8 >> amount) | (imm8 << (32 - amount))) & MASK if amount else imm8
            shifter_carry = bool(b >> 31) if amount else self.c
        else:
            b = self.operand(word & 0xF)
            shifter_carry = self.c

        if (word >> 21) & 0xF not in DATA_PROCESSING:
            raise OracleFault("undefined-instruction")
        writes, fn = DATA_PROCESSING[(word >> 21) & 0xF]
        result, carry, overflow = fn(self.operand(rn), b)
        if word & (1 << 20):
            self.n = bool(result >> 31)
            self.z = result == 0
            self.c = shifter_carry if carry is None else carry
            if overflow is not None:
                self.v = overflow
        if writes:
            if rd == 15:
                next_pc = result
            else:
                self.regs[rd] = result
        self.regs[15] = next_pc
