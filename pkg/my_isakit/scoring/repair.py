# coding=utf-8
#
# repair.py
# 生成、评估、修订循环
#
# 每一轮是一次评估（或一次失败的合成）：
#   1. 在程序集上锁步运行当前提议并评分
#   2. 总分为 0 → converged
#   3. 严格优于当前配置 → 接受；否则记入 rejected，不再重复提议
#   4. 向 synthesizer 请求下一个提议；与当前配置相同 → no_improvement
#

import logging
from pathlib import Path
from typing import Awaitable, Callable, Literal, Optional, Sequence

from pydantic import BaseModel

from ..candidate.config import CandidateConfig
from ..candidate.knobs import Knob
from ..diff.endpoints import CandidateEndpoint, Endpoint, GoldenEndpoint
from ..diff.errors import LockstepError
from ..diff.lockstep import run_many
from ..diff.types import RunReport
from ..isa.program import Program
from .errors import SynthesizerFailure
from .feedback import FeedbackReport, merge_feedback
from .score import FidelityScore, score_runs
from .synthesizer import Synthesizer
from .weights import Weights

logger = logging.getLogger(__name__)

HISTORY_SCHEMA_VERSION = 1
DEFAULT_REPAIR_STEPS = 1000

RepairStop = Literal["converged", "budget_exhausted", "no_improvement"]


class RepairIteration(BaseModel):
    iteration: int
    version: int
    knobs: list[str]
    score: Optional[float] = None
    accepted: bool = False
    error: Optional[str] = None


class RepairHistory(BaseModel):
    schema_version: int = HISTORY_SCHEMA_VERSION
    synthesizer: str = ""
    program_digests: list[str] = []
    iterations: list[RepairIteration] = []
    stop_reason: Optional[RepairStop] = None
    final_config: Optional[dict] = None

    def accepted_scores(self) -> list[float]:
        return [it.score for it in self.iterations if it.accepted and it.score is not None]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


def save_history(history: RepairHistory, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(history.to_json(), encoding="utf-8")
    return path


class Evaluation(BaseModel):
    config: CandidateConfig
    score: FidelityScore
    feedback: FeedbackReport
    reports: list[RunReport]


ReferenceFactory = Callable[[Program], Awaitable[Endpoint]]
FaultEvaluator = Callable[[CandidateConfig], Awaitable[float]]


async def _golden(_: Program) -> Endpoint:
    return GoldenEndpoint()


async def evaluate(
    config: CandidateConfig,
    programs: Sequence[Program],
    weights: Optional[Weights] = None,
    max_steps: int = DEFAULT_REPAIR_STEPS,
    make_reference: Optional[ReferenceFactory] = None,
    fault_evaluator: Optional[FaultEvaluator] = None,
    workers: int = 4,
) -> Evaluation:
    """
    Lockstep every program against the reference and score the set.

    Raises:
        LockstepError: a run failed operationally
    """

    async def make_candidate(_: Program) -> Endpoint:
        return CandidateEndpoint(config)

    results = await run_many(
        programs, make_reference or _golden, make_candidate, max_steps, "run_to_budget", workers
    )
    reports = []
    for program, result in zip(programs, results):
        if isinstance(result, Exception):
            raise LockstepError(f"{program.name or program.short_digest}: {result}") from result
        reports.append(result)
    fault_metrics = await fault_evaluator(config) if fault_evaluator else None
    fidelity = score_runs(reports, fault_metrics, weights)
    return Evaluation(
        config=config,
        score=fidelity,
        feedback=merge_feedback(reports, fidelity),
        reports=reports,
    )


async def repair_loop(
    initial: CandidateConfig,
    synthesizer: Synthesizer,
    programs: Sequence[Program],
    budget: int,
    weights: Optional[Weights] = None,
    max_steps: int = DEFAULT_REPAIR_STEPS,
    make_reference: Optional[ReferenceFactory] = None,
    fault_evaluator: Optional[FaultEvaluator] = None,
    workers: int = 4,
) -> tuple[CandidateConfig, RepairHistory]:
    """
    Greedy repair: accepted configs have strictly decreasing aggregate scores.

    Raises:
        ValueError: budget < 1
        LockstepError: an evaluation failed operationally
    """
    if budget < 1:
        raise ValueError("repair budget must be at least 1")

    history = RepairHistory(
        synthesizer=synthesizer.name,
        program_digests=[p.digest for p in programs],
    )
    rejected: set[frozenset[Knob]] = set()
    current: Optional[Evaluation] = None
    proposal = initial
    next_version = initial.version

    async def run(config: CandidateConfig) -> Evaluation:
        return await evaluate(
            config, programs, weights, max_steps, make_reference, fault_evaluator, workers
        )

    iteration = 0
    while iteration < budget:
        iteration += 1
        if proposal is not None:
            evaluation = await run(proposal)
            aggregate = evaluation.score.aggregate
            accepted = current is None or aggregate < current.score.aggregate
            history.iterations.append(
                RepairIteration(
                    iteration=iteration,
                    version=proposal.version,
                    knobs=[k.value for k in proposal.ordered_knobs],
                    score=aggregate,
                    accepted=accepted,
                )
            )
            logger.info(
                f"Repair iteration {iteration}: {proposal.label()} v{proposal.version} "
                f"score {aggregate:.6f} {'accepted' if accepted else 'rejected'}"
            )
            if accepted:
                current = evaluation
            else:
                rejected.add(proposal.active_knobs)
            if current.score.perfect:
                history.stop_reason = "converged"
                break
        if iteration >= budget:
            break

        next_version += 1
        try:
            candidate = await synthesizer.propose(
                current.config, current.feedback, current.score, frozenset(rejected)
            )
        except SynthesizerFailure as exc:
            # 失败的合成占用下一轮预算
            logger.warning(f"Synthesizer failed after iteration {iteration}: {exc}")
            history.iterations.append(
                RepairIteration(iteration=iteration + 1, version=next_version, knobs=[], error=str(exc))
            )
            proposal = None
            continue

        if candidate.same_knobs(current.config) or candidate.active_knobs in rejected:
            logger.info(f"Synthesizer proposed nothing new after iteration {iteration}")
            history.stop_reason = "no_improvement"
            break
        proposal = candidate.with_version(next_version)

    if history.stop_reason is None:
        history.stop_reason = "budget_exhausted"
    final = current.config if current is not None else initial
    history.final_config = final.to_document()
    return final, history
