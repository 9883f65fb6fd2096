# coding=utf-8
#
# fault_commands.py
# fault：在参考与候选上注入相同故障，比较响应
#

import logging

from my_isakit.fault import generate_campaign, run_fault_campaign

from .base import EXIT_CLEAN, EXIT_DIVERGED, EXIT_ERROR, CommandBase
from .common import load_candidate, load_single_program, pool_size, read_campaign, reference_factory

logger = logging.getLogger(__name__)


class FaultCommand(CommandBase):
    name = "fault"
    summary = "Run a fault-injection campaign"
    description = (
        "Runs the campaign file given with --campaign, or generates --faults faults from --seed "
        "for the program. Exit 1 when any fault response diverged, 2 when specs only failed "
        "operationally."
    )

    async def do_command_async(self) -> int:
        config = self.config
        program = load_single_program(config)
        candidate = load_candidate(config)
        if config.campaign:
            campaign = read_campaign(config.campaign)
        else:
            campaign = generate_campaign(program, config.seed, config.fault_count, config.max_steps)
            self.context.write_artifact(
                f"faults/campaign-{program.short_digest}-{config.seed}.json",
                "fault_campaign",
                campaign.model_dump(mode="json"),
            )
        self.context.notification_display.info(
            f"{len(campaign.specs)} fault(s) on {program.name or program.short_digest}, "
            f"candidate {candidate.label()}, seed {campaign.seed}"
        )

        report = await run_fault_campaign(
            program, campaign, candidate, reference_factory(config), pool_size(config)
        )
        self.context.write_artifact(
            f"faults/report-{program.short_digest}-{campaign.seed}.json",
            "fault_campaign_report",
            report.model_dump(mode="json"),
        )

        self.context.report_display.fault_campaign(report)
        if report.diverged:
            self.context.notification_display.warning(
                f"{report.diverged} of {len(report.results)} fault responses diverged"
            )
            return EXIT_DIVERGED
        if report.errors:
            self.context.notification_display.error(f"{report.errors} fault run(s) failed")
            return EXIT_ERROR
        self.context.notification_display.success("Fault responses match")
        return EXIT_CLEAN
