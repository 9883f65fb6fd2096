# coding=utf-8
#
# run_commands.py
# run / campaign：单次与批量锁步比对
#

import logging

from my_isakit.diff import CandidateEndpoint, RunReport, lockstep_run, run_many
from my_isakit.scoring import render_feedback, score

from .base import EXIT_CLEAN, EXIT_DIVERGED, EXIT_ERROR, CommandBase
from .common import (
    load_candidate,
    load_optional_weights,
    load_programs,
    load_single_program,
    pool_size,
    reference_factory,
)

logger = logging.getLogger(__name__)


class RunCommand(CommandBase):
    name = "run"
    summary = "Lockstep one program against the reference"
    description = (
        "Runs the candidate and the reference side by side, writes the run report, "
        "feedback and score under the output directory. Exit 1 when any discrepancy is found."
    )

    async def do_command_async(self) -> int:
        config = self.config
        program = load_single_program(config)
        candidate = load_candidate(config)
        weights = load_optional_weights(config)
        mode = "fail_fast" if config.fail_fast else "run_to_budget"
        self.context.notification_display.info(
            f"Program {program.name or program.short_digest}, candidate {candidate.label()}, "
            f"reference {config.reference}, seed {config.seed}"
        )

        reference = await reference_factory(config)(program)
        try:
            report = await lockstep_run(
                reference, CandidateEndpoint(candidate), program, config.max_steps, mode
            )
        finally:
            await reference.close()

        fidelity = score(report, weights=weights)
        feedback = render_feedback(report, fidelity)
        stem = program.short_digest
        self.context.write_run_report(report, f"reports/{stem}.jsonl")
        self.context.write_artifact(f"feedback/{stem}.json", "feedback", feedback.model_dump(mode="json"))
        self.context.write_artifact(f"scores/{stem}.json", "score", fidelity.model_dump(mode="json"))

        self.context.report_display.run_summary(report, fidelity)
        if report.diverged:
            self.context.report_display.feedback(feedback)
            return EXIT_DIVERGED
        self.context.notification_display.success(f"No divergence over {report.step_count} steps")
        return EXIT_CLEAN


def campaign_row(program, result: RunReport | Exception, weights) -> dict:
    row = {"digest": program.digest, "name": program.name}
    if isinstance(result, Exception):
        return {**row, "error": f"{type(result).__name__}: {result}"}
    return {
        **row,
        "steps": result.step_count,
        "stop_reason": result.stop_reason,
        "discrepancies": len(result.discrepancies),
        "aggregate": score(result, weights=weights).aggregate,
        "error": None,
    }


class CampaignCommand(CommandBase):
    name = "campaign"
    summary = "Lockstep every program of a directory or a seeded generator"
    description = (
        "Writes one report per program, named by program digest, and an aggregate summary. "
        "Exit 1 when any program diverged, 2 when runs only failed operationally."
    )

    async def do_command_async(self) -> int:
        config = self.config
        programs = load_programs(config)
        candidate = load_candidate(config)
        weights = load_optional_weights(config)
        mode = "fail_fast" if config.fail_fast else "run_to_budget"

        async def make_candidate(_):
            return CandidateEndpoint(candidate)

        results = await run_many(
            programs, reference_factory(config), make_candidate, config.max_steps, mode, pool_size(config)
        )

        rows = []
        for program, result in zip(programs, results):
            if not isinstance(result, Exception):
                self.context.write_run_report(result, f"campaign/{program.short_digest}.jsonl")
            rows.append(campaign_row(program, result, weights))

        completed = [r for r in rows if r["error"] is None]
        divergent = sum(1 for r in completed if r["discrepancies"])
        errors = len(rows) - len(completed)
        mean = sum(r["aggregate"] for r in completed) / len(completed) if completed else 0.0
        summary = {
            "candidate_config": candidate.to_document(),
            "programs": len(rows),
            "divergent": divergent,
            "errors": errors,
            "mean_aggregate": mean,
            "runs": rows,
        }
        self.context.write_artifact("campaign/summary.json", "campaign_summary", summary)

        self.context.report_display.campaign(rows)
        self.context.notification_display.info(
            f"{len(rows)} programs, {divergent} divergent, {errors} errors, mean aggregate {mean:.6f}"
        )
        if divergent:
            return EXIT_DIVERGED
        if errors:
            self.context.notification_display.error(f"{errors} run(s) failed")
            return EXIT_ERROR
        return EXIT_CLEAN
