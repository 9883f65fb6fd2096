# coding=utf-8
#
# common.py
# 子命令共用的资源加载：程序、候选配置、权重、参考端点
#

import json
import logging
from pathlib import Path
from typing import Optional

from my_isakit.candidate import CandidateConfig, load_candidate_config
from my_isakit.diff import Endpoint, GoldenEndpoint, RspEndpoint, RunReport, read_report_jsonl
from my_isakit.fault import FaultCampaign, campaign_from_json
from my_isakit.isa import Program, generate_program, generate_programs, load_program
from my_isakit.rsp import RegisterLayout, load_layout
from my_isakit.scoring import Weights, load_weights

from ..config import ConfigError, HarnessConfig
from ..context import unwrap_artifact

logger = logging.getLogger(__name__)

PROGRAM_SUFFIXES = (".bin", ".hex", ".txt", ".lst")


def load_candidate(config: HarnessConfig) -> CandidateConfig:
    if not config.candidate:
        return CandidateConfig()
    return load_candidate_config(config.candidate)


def load_optional_weights(config: HarnessConfig) -> Optional[Weights]:
    return load_weights(config.weights) if config.weights else None


def load_optional_layout(config: HarnessConfig) -> Optional[RegisterLayout]:
    return load_layout(config.layout) if config.layout else None


def reference_factory(config: HarnessConfig):
    """Async factory ``program -> Endpoint`` for the configured reference."""
    layout = load_optional_layout(config)

    async def make_reference(_: Program) -> Endpoint:
        if config.uses_golden:
            return GoldenEndpoint()
        return await RspEndpoint.connect(config.reference, layout, config.timeout_secs)

    return make_reference


def pool_size(config: HarnessConfig) -> int:
    # a remote stub serves one client at a time
    return config.workers if config.uses_golden else 1


def load_single_program(config: HarnessConfig) -> Program:
    if config.program:
        return load_program(config.program, config.load_address)
    return generate_program(config.seed, config.program_length)


def load_programs(config: HarnessConfig) -> list[Program]:
    """Campaign programs ordered by digest."""
    if config.program:
        programs = [load_program(config.program, config.load_address)]
    elif config.programs_dir:
        paths = sorted(
            p for p in Path(config.programs_dir).iterdir() if p.suffix.lower() in PROGRAM_SUFFIXES
        )
        if not paths:
            raise ConfigError(f"no program files in {config.programs_dir}")
        programs = [load_program(p, config.load_address) for p in paths]
    else:
        programs = generate_programs(config.seed, config.program_count, config.program_length)
    logger.info(f"Loaded {len(programs)} program(s)")
    return sorted(programs, key=lambda p: p.digest)


def read_stored_report(path: str | Path) -> RunReport:
    """A RunReport from a JSONL stream, a bare JSON report or an artifact envelope."""
    path = Path(path)
    if path.suffix.lower() == ".jsonl":
        return read_report_jsonl(path)
    doc = unwrap_artifact(json.loads(path.read_text(encoding="utf-8")))
    return RunReport.model_validate(doc)


def read_campaign(path: str | Path) -> FaultCampaign:
    """A campaign file, bare or wrapped in an artifact envelope."""
    doc = unwrap_artifact(json.loads(Path(path).read_text(encoding="utf-8")))
    return campaign_from_json(json.dumps(doc))
