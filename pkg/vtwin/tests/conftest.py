# coding=utf-8
#
# conftest.py
#
# 命令行测试辅助：写入程序与候选配置文件，读取输出目录中的产物
#

import json
import logging
from pathlib import Path
from typing import Iterable

from my_isakit.candidate import CandidateConfig, Knob, save_candidate_config, witness_program
from my_isakit.isa import Program

from vtwin.vtwin import run_main

logger = logging.getLogger(__name__)


def write_binary(directory: Path, program: Program, name: str = "program.bin") -> Path:
    path = directory / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(program.image.snapshot())
    return path


def write_witness(directory: Path, knob: Knob) -> Path:
    return write_binary(directory, witness_program(knob), f"{knob.value}.bin")


def write_candidate(directory: Path, knobs: Iterable[str], name: str = "candidate.json") -> Path:
    return save_candidate_config(CandidateConfig.from_names(knobs), directory / name)


def read_artifact(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


async def vtwin(*argv: str | Path) -> int:
    """Run the command line in-process; returns the exit code."""
    return await run_main([str(arg) for arg in argv])
