# coding=utf-8
#
# score_commands.py
# score：用（可能不同的）权重重新计算已保存报告的评分
#

import logging

from my_isakit.scoring import score_runs

from ..config import ConfigError
from .base import EXIT_CLEAN, EXIT_DIVERGED, CommandBase
from .common import load_optional_weights, read_stored_report

logger = logging.getLogger(__name__)


class ScoreCommand(CommandBase):
    name = "score"
    summary = "Recompute the fidelity score of stored run reports"
    description = "Reads the --reports files (JSONL or JSON) and scores them with --weights."

    async def do_command_async(self) -> int:
        if not self.config.reports:
            raise ConfigError("score needs at least one report (--reports)")
        reports = [read_stored_report(path) for path in self.config.reports]
        fidelity = score_runs(reports, None, load_optional_weights(self.config))
        self.context.write_artifact("scores/rescored.json", "score", fidelity.model_dump(mode="json"))

        self.context.report_display.score(fidelity)
        self.console.print(f"aggregate {fidelity.aggregate}")
        return EXIT_CLEAN if fidelity.perfect else EXIT_DIVERGED
