# coding=utf-8
#
# alu_tests.py
# 减法标志位与条件码的性质测试：和无界整数运算逐一对照
#

import logging
import random

import pytest

from my_isakit.isa import (
    Flags,
    add_with_carry,
    alu_flags_sub,
    byte_swap,
    evaluate_condition,
    expand_imm,
    sign_extend,
    to_signed,
)
from .conftest import scale

logger = logging.getLogger(__name__)

EDGES = (0, 1, 2, 0x7F, 0x80, 0x7FFFFFFF, 0x80000000, 0x80000001, 0xFFFFFFFE, 0xFFFFFFFF)


def _pairs():
    rng = random.Random(20240501)
    for a in EDGES:
        for b in EDGES:
            yield a, b
    for _ in range(scale(10_000, 100_000)):
        yield rng.getrandbits(32), rng.getrandbits(32)


def _signed(x: int) -> int:
    return x - (1 << 32) if x >= 1 << 31 else x


def test_subtraction_flags_match_wide_arithmetic():
    for a, b in _pairs():
        flags = alu_flags_sub(a, b)
        wide = _signed(a) - _signed(b)
        result = (a - b) % (1 << 32)
        assert flags.n == (result >= 1 << 31), (a, b)
        assert flags.z == (a == b), (a, b)
        assert flags.c == (a >= b), (a, b)
        assert flags.v == (not -(1 << 31) <= wide < 1 << 31), (a, b)


def test_conditions_after_compare_order_operands():
    for a, b in _pairs():
        flags = alu_flags_sub(a, b)
        sa, sb = _signed(a), _signed(b)
        assert evaluate_condition(flags, 0x0) == (a == b)
        assert evaluate_condition(flags, 0x1) == (a != b)
        assert evaluate_condition(flags, 0x2) == (a >= b)
        assert evaluate_condition(flags, 0x3) == (a < b)
        assert evaluate_condition(flags, 0x8) == (a > b)
        assert evaluate_condition(flags, 0x9) == (a <= b)
        assert evaluate_condition(flags, 0xA) == (sa >= sb)
        assert evaluate_condition(flags, 0xB) == (sa < sb)
        assert evaluate_condition(flags, 0xC) == (sa > sb)
        assert evaluate_condition(flags, 0xD) == (sa <= sb)
        assert evaluate_condition(flags, 0xE)


def test_add_with_carry_edges():
    assert add_with_carry(0xFFFFFFFF, 1, False) == (0, True, False)
    assert add_with_carry(0x7FFFFFFF, 1, False) == (0x80000000, False, True)
    assert add_with_carry(0x80000000, 0x80000000, False) == (0, True, True)
    assert add_with_carry(5, ~3 & 0xFFFFFFFF, True) == (2, True, False)


def test_negative_compare_sets_n():
    flags = alu_flags_sub(10, 20)
    assert flags == Flags(n=True, z=False, c=False, v=False)
    assert to_signed((10 - 20) & 0xFFFFFFFF) == -10


@pytest.mark.parametrize(
    "imm8, rotate, carry_in, expected",
    [
        (10, 0, True, (10, True)),
        (10, 0, False, (10, False)),
        (1, 12, True, (0x100, False)),
        (2, 1, False, (0x80000000, True)),
        (0xFF, 4, False, (0xFF000000, True)),
    ],
)
def test_expand_imm(imm8, rotate, carry_in, expected):
    assert expand_imm(imm8, rotate, carry_in) == expected


def test_bit_helpers():
    assert sign_extend(0x8000, 16) == 0xFFFF8000
    assert sign_extend(0x7FFF, 16) == 0x7FFF
    assert byte_swap(0x12) == 0x12000000
    assert byte_swap(0x11223344) == 0x44332211
    assert to_signed(0xFFFFFFFF) == -1
