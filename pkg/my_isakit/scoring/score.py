# coding=utf-8
#
# score.py
# 多维保真度评分
#
# 每个维度按其机会数归一化到 [0, 1]：
#   register_trace_delta       不同的 (seq, 寄存器) 单元 / (steps × 16)
#   memory_trace_delta         不同的 (seq, 写地址) 单元 / (steps × 写集合大小)
#   state_transition_mismatch  (pc 转移 + 标志位单元 + 解码分歧) / (steps × 5 + 解码分歧)
#   timing_deviation           |Σ参考周期 − Σ候选周期| / Σ参考周期
#   resource_profile_delta     执行指令数与写内存足迹的相对差均值
#   fault_response_divergence  故障活动中出现分歧的比例
#

import logging
from typing import Optional, Sequence

from pydantic import BaseModel

from ..diff.metrics import resource_profile, trace_delta
from ..diff.types import DiscrepancyClass, RunReport
from ..isa.types import NUM_REGS
from .weights import DIMENSIONS, Weights

logger = logging.getLogger(__name__)

SCORE_SCHEMA_VERSION = 1


class FidelityScore(BaseModel):
    """0 is perfect fidelity on every dimension."""

    schema_version: int = SCORE_SCHEMA_VERSION
    register_trace_delta: float = 0.0
    memory_trace_delta: float = 0.0
    timing_deviation: float = 0.0
    state_transition_mismatch: float = 0.0
    fault_response_divergence: float = 0.0
    resource_profile_delta: float = 0.0
    aggregate: float = 0.0
    discrepancy_count: int = 0
    runs: int = 1

    @property
    def perfect(self) -> bool:
        return self.aggregate == 0

    def dimensions(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in DIMENSIONS}


def _ratio(count: float, opportunities: float) -> float:
    if count <= 0:
        return 0.0
    return min(1.0, count / max(1.0, opportunities))


def _relative(a: int, b: int) -> float:
    return min(1.0, abs(a - b) / max(1, a))


def _aggregate(dims: dict[str, float], weights: Weights, has_fault: bool) -> float:
    effective = weights.effective(has_fault)
    total = sum(effective[name] * dims[name] for name in DIMENSIONS)
    # 浮点误差不能让全零维度得到非零总分
    return 0.0 if all(dims[name] == 0 for name in DIMENSIONS) else min(1.0, total)


def score(
    report: RunReport,
    fault_metrics: Optional[float] = None,
    weights: Optional[Weights] = None,
) -> FidelityScore:
    """
    Score one run.

    Args:
        fault_metrics: fault_response_divergence of a campaign, None when no campaign ran
            (the fault weight is then redistributed)
    """
    weights = weights or Weights()
    metrics = trace_delta(
        report.reference_trace,
        report.candidate_trace,
        report.reference_initial,
        report.candidate_initial,
    )
    steps = metrics.steps
    decode = sum(1 for d in report.discrepancies if d.category is DiscrepancyClass.DECODE_MISMATCH)

    ref_executed, ref_footprint = resource_profile(report.reference_trace)
    cand_executed, cand_footprint = resource_profile(report.candidate_trace)

    dims = {
        "register_trace_delta": _ratio(metrics.register_delta_count, steps * NUM_REGS),
        "memory_trace_delta": _ratio(
            metrics.memory_delta_count, steps * metrics.memory_locations
        ),
        "timing_deviation": min(1.0, metrics.timing_deviation),
        "state_transition_mismatch": _ratio(
            metrics.transition_mismatches + metrics.flag_delta_count + decode,
            steps * 5 + decode,
        ),
        "fault_response_divergence": min(1.0, max(0.0, fault_metrics or 0.0)),
        "resource_profile_delta": (
            _relative(ref_executed, cand_executed) + _relative(ref_footprint, cand_footprint)
        )
        / 2,
    }
    return FidelityScore(
        **dims,
        aggregate=_aggregate(dims, weights, fault_metrics is not None),
        discrepancy_count=len(report.discrepancies),
    )


def score_runs(
    reports: Sequence[RunReport],
    fault_metrics: Optional[float] = None,
    weights: Optional[Weights] = None,
) -> FidelityScore:
    """Mean of the per-run scores, dimension by dimension."""
    weights = weights or Weights()
    if not reports:
        return FidelityScore(runs=0)
    scores = [score(r, fault_metrics, weights) for r in reports]
    dims = {name: sum(getattr(s, name) for s in scores) / len(scores) for name in DIMENSIONS}
    return FidelityScore(
        **dims,
        aggregate=_aggregate(dims, weights, fault_metrics is not None),
        discrepancy_count=sum(s.discrepancy_count for s in scores),
        runs=len(scores),
    )
