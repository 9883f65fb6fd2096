# coding=utf-8
#
# conftest.py
#
# 测试共用的程序构造、锁步运行与回环 stub 辅助函数
#

import os
import logging
from contextlib import asynccontextmanager
from typing import AsyncIterator, Iterable, Optional, Sequence

from my_isakit.candidate import CandidateConfig
from my_isakit.diff import GoldenEndpoint, RunReport, lockstep_run
from my_isakit.isa import GoldenMachine, Machine, MemoryImage, Program, assemble_program
from my_isakit.rsp import RspStub

logger = logging.getLogger(__name__)

# 完整规模的验收测试较慢，默认只跑缩小版本
SLOW = os.getenv("VTWIN_SLOW_TESTS", "") == "1"
INTEROP_ENDPOINT = os.getenv("VTWIN_INTEROP_ENDPOINT", "")

DATA_BASE = 0x100
DATA_SIZE = 0x40


def scale(quick: int, full: int) -> int:
    return full if SLOW else quick


def program_from_source(
    lines: Sequence[str],
    name: str = "",
    halt: bool = True,
    data_base: int = DATA_BASE,
) -> Program:
    """Assemble at address 0, optionally append ``B .``, and pad with a zeroed data area."""
    words = assemble_program([*lines, "B ."] if halt else list(lines))
    size = max(data_base + DATA_SIZE, 4 * len(words)) if halt else 4 * len(words)
    image = bytearray(size)
    for i, word in enumerate(words):
        image[4 * i : 4 * i + 4] = word.to_bytes(4, "little")
    return Program(MemoryImage(0, image), 0, name)


async def run_pair(
    program: Program,
    candidate: Optional[CandidateConfig | Iterable[str]] = None,
    budget: int = 32,
    mode: str = "run_to_budget",
    **kwargs,
) -> RunReport:
    """Lockstep the in-process golden reference against a candidate config."""
    if candidate is None:
        candidate = CandidateConfig()
    elif not isinstance(candidate, CandidateConfig):
        candidate = CandidateConfig.from_names(candidate)
    return await lockstep_run(GoldenEndpoint(), candidate, program, budget, mode, **kwargs)


@asynccontextmanager
async def loopback_stub(
    machine: Optional[Machine] = None,
    program: Optional[Program] = None,
    read_only: Iterable[tuple[int, int]] = (),
) -> AsyncIterator[tuple[RspStub, str]]:
    """A stub on an ephemeral localhost port; yields (stub, "host:port")."""
    machine = machine or GoldenMachine()
    if program is not None:
        machine.load(program)
    stub = RspStub(machine, read_only=read_only)
    port = await stub.start("127.0.0.1", 0)
    try:
        yield stub, f"127.0.0.1:{port}"
    finally:
        await stub.stop()


def first_classes(report: RunReport) -> list[str]:
    return [d.category.value for d in report.discrepancies]
