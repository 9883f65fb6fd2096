# coding=utf-8
#
# program.py
# 程序映像：加载（二进制 / 十六进制清单）与种子随机生成
#

import hashlib
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .assembler import rotated_immediate
from .decoder import HALT_WORD, encode
from .types import COND_AL, DP_OPCODES, COMPARES, MOVES, DecodedInstr, MemoryImage, Mnemonic

logger = logging.getLogger(__name__)

# 生成器算法变化时递增，写入报告
GENERATOR_VERSION = 1

# 生成程序中 R7 固定为数据区基址
DATA_BASE_REG = 7
DATA_AREA_SIZE = 0x100


@dataclass(frozen=True)
class Program:
    """A loadable program: memory image plus entry point."""

    image: MemoryImage
    entry: int
    name: str = ""

    @property
    def digest(self) -> str:
        """sha256 over base, entry and image bytes; the program identity in reports."""
        h = hashlib.sha256()
        h.update(self.image.base.to_bytes(4, "little"))
        h.update(self.entry.to_bytes(4, "little"))
        h.update(self.image.snapshot())
        return h.hexdigest()

    @property
    def short_digest(self) -> str:
        return self.digest[:16]

    def words(self) -> list[int]:
        data = self.image.snapshot()
        return [int.from_bytes(data[i : i + 4], "little") for i in range(0, len(data) - 3, 4)]


def from_words(
    words: Iterable[int], base: int = 0, entry: Optional[int] = None, name: str = ""
) -> Program:
    data = b"".join((w & 0xFFFFFFFF).to_bytes(4, "little") for w in words)
    return Program(MemoryImage(base, data), base if entry is None else entry, name)


def load_binary(
    path: str | Path, load_address: int = 0, entry: Optional[int] = None
) -> Program:
    """Load a flat little-endian binary image at ``load_address``."""
    path = Path(path)
    data = path.read_bytes()
    logger.debug(f"Loaded {len(data)} bytes from {path} at 0x{load_address:08x}")
    return Program(
        MemoryImage(load_address, data),
        load_address if entry is None else entry,
        path.stem,
    )


def parse_hex_listing(text: str) -> list[int]:
    """
    One 8-hex-digit word per line; ``#`` starts a comment; blank lines are skipped.

    Raises:
        ValueError: a line is not a single 32-bit hex word
    """
    words = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        token = line[2:] if line.lower().startswith("0x") else line
        if len(token) != 8:
            raise ValueError(f"line {lineno}: expected 8 hex digits, got {line!r}")
        try:
            words.append(int(token, 16))
        except ValueError:
            raise ValueError(f"line {lineno}: not a hex word: {line!r}") from None
    return words


def load_hex_listing(
    path: str | Path, base: int = 0, entry: Optional[int] = None
) -> Program:
    path = Path(path)
    words = parse_hex_listing(path.read_text(encoding="utf-8"))
    return from_words(words, base, entry, path.stem)


def load_program(path: str | Path, load_address: int = 0) -> Program:
    """Dispatch on suffix: ``.hex``/``.txt``/``.lst`` listings, anything else is a flat binary."""
    path = Path(path)
    if path.suffix.lower() in (".hex", ".txt", ".lst"):
        return load_hex_listing(path, load_address)
    return load_binary(path, load_address)


def _data_base(code_bytes: int) -> int:
    # 2 的幂总能编码为循环移位立即数
    base = 0x100
    while base < code_bytes:
        base <<= 1
    return base


def generate_program(seed: int, length: int = 1000, name: str = "") -> Program:
    """
    Seeded random program over the supported subset.

    Layout: code at 0 (``MOV R7, #data``, random body, ``B .``), data area at the
    next power of two past the code. Destinations are R0-R6 so R7 stays the data
    pointer; sources are R0-R7. Loads/stores address ``[R7, #imm]`` inside the data
    area, branches stay inside the code, BX only returns through R14.

    Args:
        seed: generator seed; same seed and length give the same image
        length: total instruction count including prologue and halt loop
    """
    if length < 2:
        raise ValueError("a generated program needs at least 2 instructions")
    rng = random.Random(f"vtwin-gen:{GENERATOR_VERSION}:{seed}:{length}")
    code_bytes = length * 4
    data_base = _data_base(code_bytes)
    imm8, rotate = rotated_immediate(data_base)

    words = [
        encode(
            DecodedInstr(Mnemonic.MOV, COND_AL, 0, rd=DATA_BASE_REG, imm8=imm8, rotate=rotate)
        )
    ]
    for index in range(1, length - 1):
        words.append(encode(_random_instr(rng, index * 4, code_bytes)))
    words.append(HALT_WORD)

    image = bytearray(data_base + DATA_AREA_SIZE)
    for i, word in enumerate(words):
        image[i * 4 : i * 4 + 4] = word.to_bytes(4, "little")
    for offset in range(0, DATA_AREA_SIZE, 4):
        image[data_base + offset : data_base + offset + 4] = rng.getrandbits(32).to_bytes(
            4, "little"
        )
    return Program(MemoryImage(0, image), 0, name or f"gen-{seed}")


_CLASSES = ("dp_imm", "dp_reg", "load", "store", "branch", "bx")
_CLASS_WEIGHTS = (12, 12, 2, 2, 2, 1)


def _random_instr(rng: random.Random, pc: int, code_bytes: int) -> DecodedInstr:
    cond = rng.randrange(15)
    kind = rng.choices(_CLASSES, _CLASS_WEIGHTS)[0]
    if kind in ("dp_imm", "dp_reg"):
        mnemonic = rng.choice(list(DP_OPCODES))
        compare = mnemonic in COMPARES
        rd = 0 if compare else rng.randrange(7)
        rn = 0 if mnemonic in MOVES else rng.randrange(8)
        sets_flags = compare or rng.random() < 0.5
        if kind == "dp_imm":
            return DecodedInstr(
                mnemonic,
                cond,
                0,
                rd=rd,
                rn=rn,
                imm8=rng.randrange(256),
                rotate=rng.randrange(16),
                sets_flags=sets_flags,
            )
        return DecodedInstr(
            mnemonic, cond, 0, rd=rd, rn=rn, rm=rng.randrange(8), sets_flags=sets_flags
        )
    if kind in ("load", "store"):
        return DecodedInstr(
            Mnemonic.LDR if kind == "load" else Mnemonic.STR,
            cond,
            0,
            rd=rng.randrange(7),
            rn=DATA_BASE_REG,
            offset=4 * rng.randrange(DATA_AREA_SIZE // 4),
        )
    if kind == "branch":
        target = 4 * rng.randrange(code_bytes // 4)
        return DecodedInstr(
            Mnemonic.BL if rng.random() < 0.3 else Mnemonic.B,
            cond,
            0,
            offset=target - (pc + 8),
        )
    return DecodedInstr(Mnemonic.BX, cond, 0, rm=14)


def generate_programs(seed: int, count: int, length: int = 1000) -> list[Program]:
    return [generate_program(seed + i, length) for i in range(count)]
