# coding=utf-8
#
# layout.py
# RSP 寄存器编号与 ArchState 字段的映射
#
# 默认经典 ARM 布局：r0..r15 为 0-15，cpsr 为 25。
# 'g' 负载按描述符顺序排列；不对应 ArchState 的描述符视为填充。
#

import json
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ValidationError, model_validator

from ..isa.types import NUM_REGS, ArchState, Flags
from .codec import hex_le32, parse_hex_le
from .errors import UnexpectedReply

logger = logging.getLogger(__name__)

LAYOUT_SCHEMA_VERSION = 1


class RegisterDescriptor(BaseModel):
    name: str
    index: int
    width: int = 32
    # gpr: regs[index of name], cpsr: flags, pad: ignored
    kind: Literal["gpr", "cpsr", "pad"] = "gpr"
    gpr: Optional[int] = None

    @property
    def hex_width(self) -> int:
        return self.width // 4


class RegisterLayout(BaseModel):
    schema_version: int = LAYOUT_SCHEMA_VERSION
    descriptors: list[RegisterDescriptor]

    @model_validator(mode="after")
    def _covers_state_once(self) -> "RegisterLayout":
        gprs = sorted(-1 if d.gpr is None else d.gpr for d in self.descriptors if d.kind == "gpr")
        cpsrs = [d for d in self.descriptors if d.kind == "cpsr"]
        if gprs != list(range(NUM_REGS)) or len(cpsrs) != 1:
            raise ValueError("layout must map r0..r15 and cpsr exactly once")
        indices = [d.index for d in self.descriptors]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate register numbers in layout")
        for d in self.descriptors:
            if d.width % 8 or d.width <= 0:
                raise ValueError(f"register {d.name} has a width that is not whole bytes")
        return self

    @classmethod
    def default_arm(cls) -> "RegisterLayout":
        descriptors = [
            RegisterDescriptor(name=f"r{i}", index=i, kind="gpr", gpr=i) for i in range(NUM_REGS)
        ]
        descriptors.append(RegisterDescriptor(name="cpsr", index=25, kind="cpsr"))
        return cls(descriptors=descriptors)

    @property
    def register_count(self) -> int:
        return len(self.descriptors)

    @property
    def payload_width(self) -> int:
        return sum(d.hex_width for d in self.descriptors)

    def by_index(self, index: int) -> Optional[RegisterDescriptor]:
        for d in self.descriptors:
            if d.index == index:
                return d
        return None

    def index_of_gpr(self, gpr: int) -> int:
        for d in self.descriptors:
            if d.kind == "gpr" and d.gpr == gpr:
                return d.index
        raise KeyError(gpr)

    def index_of_cpsr(self) -> int:
        return next(d.index for d in self.descriptors if d.kind == "cpsr")

    # ---- g / G payloads -------------------------------------------------

    def encode_value(self, descriptor: RegisterDescriptor, state: ArchState) -> str:
        if descriptor.kind == "gpr":
            value = state.regs[descriptor.gpr]
        elif descriptor.kind == "cpsr":
            value = state.flags.to_cpsr()
        else:
            value = 0
        if descriptor.width == 32:
            return hex_le32(value)
        return (value & ((1 << descriptor.width) - 1)).to_bytes(descriptor.width // 8, "little").hex()

    def encode_registers(self, state: ArchState) -> str:
        return "".join(self.encode_value(d, state) for d in self.descriptors)

    def decode_registers(self, payload: str, base: Optional[ArchState] = None) -> ArchState:
        """
        Decode a 'g' reply. ``xx`` digits (unavailable registers) read as zero.

        Raises:
            UnexpectedReply: payload is shorter than the layout
        """
        if len(payload) < self.payload_width:
            raise UnexpectedReply("g", payload.encode("latin-1"))
        regs = list(base.regs if base else (0,) * NUM_REGS)
        flags = base.flags if base else Flags()
        offset = 0
        for d in self.descriptors:
            field = payload[offset : offset + d.hex_width].replace("x", "0")
            offset += d.hex_width
            if d.kind == "pad":
                continue
            try:
                value = parse_hex_le(field) & 0xFFFFFFFF
            except ValueError:
                raise UnexpectedReply("g", payload.encode("latin-1")) from None
            if d.kind == "gpr":
                regs[d.gpr] = value
            else:
                flags = Flags.from_cpsr(value)
        cycles = base.cycle_count if base else 0
        return ArchState(regs=tuple(regs), flags=flags, cycle_count=cycles)


def load_layout(path: str | Path) -> RegisterLayout:
    """
    Raises:
        ValueError: the override document is not a valid layout
    """
    path = Path(path)
    try:
        return RegisterLayout.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ValueError(f"invalid register layout {path}: {exc}") from exc
