# coding=utf-8
#
# spec.py
# FaultSpec 与 FaultCampaign，以及按种子确定性地生成故障活动
#

import json
import logging
import random
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError

from ..diff.types import FLAG_FIELDS
from ..isa.program import Program
from ..isa.types import NUM_REGS
from .errors import InvalidCampaign, InvalidLocation

logger = logging.getLogger(__name__)

CAMPAIGN_SCHEMA_VERSION = 1

FaultSpace = Literal["register", "flag", "memory"]
FaultKind = Literal["bitflip", "stuck_at_0", "stuck_at_1"]
FAULT_KINDS: tuple[str, ...] = ("bitflip", "stuck_at_0", "stuck_at_1")


class FaultSpec(BaseModel):
    """
    One disturbance, applied identically to both sides.

    bitflip is applied once before step ``trigger_seq``; stuck-at faults are
    re-asserted before every step from ``trigger_seq`` on and before every sample.
    """

    model_config = ConfigDict(frozen=True)

    space: FaultSpace
    kind: FaultKind
    trigger_seq: int = 0
    register: Optional[int] = None
    flag: Optional[str] = None
    address: Optional[int] = None
    bit: int = 0

    @property
    def persistent(self) -> bool:
        return self.kind != "bitflip"

    def check(self) -> "FaultSpec":
        """
        Raises:
            InvalidLocation: the location or bit does not exist
        """
        match self.space:
            case "register":
                if self.register is None or not 0 <= self.register < NUM_REGS:
                    raise InvalidLocation(f"register index out of range: {self.register}")
            case "flag":
                if self.flag not in FLAG_FIELDS:
                    raise InvalidLocation(f"unknown flag: {self.flag}")
            case "memory":
                if self.address is None or self.address < 0 or self.address & 3:
                    raise InvalidLocation(f"memory fault needs a word-aligned address: {self.address}")
        if self.space != "flag" and not 0 <= self.bit < 32:
            raise InvalidLocation(f"bit out of range: {self.bit}")
        if self.trigger_seq < 0:
            raise InvalidLocation(f"negative trigger step: {self.trigger_seq}")
        return self

    def transform(self, value: int) -> int:
        """Apply the fault to a word (or to 0/1 for a flag)."""
        mask = 1 if self.space == "flag" else 1 << self.bit
        match self.kind:
            case "bitflip":
                return value ^ mask
            case "stuck_at_0":
                return value & ~mask
            case _:
                return value | mask

    def label(self) -> str:
        match self.space:
            case "register":
                where = f"R{self.register}[{self.bit}]"
            case "flag":
                where = str(self.flag)
            case _:
                where = f"mem[0x{self.address:08x}][{self.bit}]"
        return f"{self.kind} {where} @ {self.trigger_seq}"


class FaultCampaign(BaseModel):
    schema_version: int = CAMPAIGN_SCHEMA_VERSION
    program_digest: str = ""
    seed: Optional[int] = None
    budget: int = 1000
    specs: list[FaultSpec] = []

    def check(self) -> "FaultCampaign":
        """
        Raises:
            InvalidCampaign: schema or budget mismatch
            InvalidLocation: a spec targets a missing location
        """
        if self.schema_version != CAMPAIGN_SCHEMA_VERSION:
            raise InvalidCampaign(f"unsupported campaign schema version {self.schema_version}")
        for index, spec in enumerate(self.specs):
            spec.check()
            if spec.trigger_seq >= self.budget:
                raise InvalidCampaign(
                    f"spec {index}: trigger step {spec.trigger_seq} is not below budget {self.budget}"
                )
        return self


def generate_campaign(program: Program, seed: int, count: int, budget: int = 1000) -> FaultCampaign:
    """Random single-point faults; a pure function of (seed, program digest, count)."""
    rng = random.Random(f"{seed}:{program.digest}:{count}")
    words = max(1, program.image.size // 4)
    specs = []
    for _ in range(count):
        space = rng.choice(("register", "register", "flag", "memory"))
        kind = rng.choice(FAULT_KINDS)
        trigger = rng.randrange(max(1, budget))
        match space:
            case "register":
                spec = FaultSpec(
                    space=space, kind=kind, trigger_seq=trigger,
                    register=rng.randrange(NUM_REGS - 1), bit=rng.randrange(32),
                )  # fmt: skip
            case "flag":
                spec = FaultSpec(space=space, kind=kind, trigger_seq=trigger, flag=rng.choice(FLAG_FIELDS))
            case _:
                address = program.image.base + 4 * rng.randrange(words)
                spec = FaultSpec(
                    space=space, kind=kind, trigger_seq=trigger,
                    address=address, bit=rng.randrange(32),
                )  # fmt: skip
        specs.append(spec)
    return FaultCampaign(program_digest=program.digest, seed=seed, budget=budget, specs=specs)


def campaign_from_json(text: str) -> FaultCampaign:
    try:
        return FaultCampaign.model_validate_json(text).check()
    except ValidationError as exc:
        raise InvalidCampaign(str(exc)) from exc


def load_campaign(path: str | Path) -> FaultCampaign:
    return campaign_from_json(Path(path).read_text(encoding="utf-8"))


def save_campaign(campaign: FaultCampaign, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(campaign.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8")
    return path
