# coding=utf-8
#
# campaign.py
# 运行故障活动：每个 FaultSpec 一次独立的锁步运行
#

import logging
from pathlib import Path
from typing import Awaitable, Callable, Optional

import anyio
from pydantic import BaseModel

from ..candidate.config import CandidateConfig
from ..diff.endpoints import CandidateEndpoint, Endpoint, GoldenEndpoint
from ..diff.lockstep import lockstep_run
from ..diff.types import RunReport
from ..isa.program import Program
from .errors import InvalidCampaign
from .inject import FaultInjector
from .spec import CAMPAIGN_SCHEMA_VERSION, FaultCampaign, FaultSpec

logger = logging.getLogger(__name__)

ReferenceFactory = Callable[[Program], Awaitable[Endpoint]]


class FaultRunResult(BaseModel):
    index: int
    spec: FaultSpec
    report: Optional[RunReport] = None
    error: Optional[str] = None

    @property
    def diverged(self) -> bool:
        return self.report is not None and self.report.diverged


class FaultCampaignReport(BaseModel):
    schema_version: int = CAMPAIGN_SCHEMA_VERSION
    program_digest: str
    seed: Optional[int] = None
    budget: int
    candidate_config: dict
    results: list[FaultRunResult] = []
    fault_response_divergence: float = 0.0

    @property
    def errors(self) -> int:
        return sum(1 for r in self.results if r.error is not None)

    @property
    def diverged(self) -> int:
        return sum(1 for r in self.results if r.diverged)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"


def save_campaign_report(report: FaultCampaignReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json(), encoding="utf-8")
    return path


async def _golden(_: Program) -> Endpoint:
    return GoldenEndpoint()


def divergence_fraction(results: list[FaultRunResult]) -> float:
    """Share of specs whose run diverged; errored specs are left out."""
    completed = [r for r in results if r.error is None]
    if not completed:
        return 0.0
    return sum(1 for r in completed if r.diverged) / len(completed)


async def run_fault_campaign(
    program: Program,
    campaign: FaultCampaign,
    candidate_config: CandidateConfig,
    make_reference: Optional[ReferenceFactory] = None,
    workers: int = 4,
) -> FaultCampaignReport:
    """
    Reference-with-fault against candidate-with-the-same-fault, once per spec.

    A spec that fails operationally is recorded with its error; the others still run.
    """
    campaign.check()
    if campaign.program_digest and campaign.program_digest != program.digest:
        raise InvalidCampaign(f"campaign was generated for program {campaign.program_digest[:12]}")
    make_reference = make_reference or _golden
    results: list[Optional[FaultRunResult]] = [None] * len(campaign.specs)
    limiter = anyio.CapacityLimiter(max(1, workers))

    async def run_one(index: int, spec: FaultSpec) -> None:
        async with limiter:
            reference = None
            candidate = CandidateEndpoint(candidate_config)
            try:
                reference = await make_reference(program)
                report = await lockstep_run(
                    reference,
                    candidate,
                    program,
                    campaign.budget,
                    hook=FaultInjector(spec),
                )
                report = report.model_copy(update={"fault_spec": spec.model_dump(mode="json")})
                results[index] = FaultRunResult(index=index, spec=spec, report=report)
            except Exception as exc:  # noqa: BLE001
                logger.error(f"Fault spec {index} ({spec.label()}) failed: {exc}")
                results[index] = FaultRunResult(index=index, spec=spec, error=str(exc))
            finally:
                await candidate.close()
                if reference is not None:
                    await reference.close()

    async with anyio.create_task_group() as tg:
        for index, spec in enumerate(campaign.specs):
            tg.start_soon(run_one, index, spec)

    merged = [r for r in results if r is not None]
    report = FaultCampaignReport(
        program_digest=program.digest,
        seed=campaign.seed,
        budget=campaign.budget,
        candidate_config=candidate_config.to_document(),
        results=merged,
        fault_response_divergence=divergence_fraction(merged),
    )
    logger.info(
        f"Fault campaign {program.short_digest}: {len(merged)} specs, "
        f"{report.diverged} diverged, {report.errors} errors"
    )
    return report
