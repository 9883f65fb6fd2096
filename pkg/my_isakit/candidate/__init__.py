# coding=utf-8
#
# candidate 包
# 带语义缺陷开关的候选 CPU 模型
#

from .config import (
    CONFIG_SCHEMA_VERSION,
    CandidateConfig,
    load_candidate_config,
    save_candidate_config,
)
from .errors import InvalidCandidateConfig, UnknownKnob
from .knobs import CATALOG, KNOB_INFO, Knob, KnobInfo, catalog_order, knob_from_name
from .model import (
    CandidateInterpreter,
    CandidateModel,
    candidate_step,
    instantiate,
    power_on_registers,
)
from .witness import (
    WITNESS_BUDGET,
    negative_compare_program,
    witness_program,
    witness_programs,
)

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "CandidateConfig",
    "load_candidate_config",
    "save_candidate_config",
    "InvalidCandidateConfig",
    "UnknownKnob",
    "CATALOG",
    "KNOB_INFO",
    "Knob",
    "KnobInfo",
    "catalog_order",
    "knob_from_name",
    "CandidateInterpreter",
    "CandidateModel",
    "candidate_step",
    "instantiate",
    "power_on_registers",
    "WITNESS_BUDGET",
    "negative_compare_program",
    "witness_program",
    "witness_programs",
]
