# coding=utf-8
#
# repair_commands.py
# repair：评分驱动的候选模型修复循环
#

import json
import logging
from pathlib import Path
from typing import Optional

from my_isakit.candidate import CandidateConfig, witness_programs
from my_isakit.fault import run_fault_campaign
from my_isakit.isa import Program, load_program
from my_isakit.scoring import BuiltinSynthesizer, ExternalSynthesizer, Synthesizer, repair_loop

from .base import EXIT_CLEAN, EXIT_DIVERGED, CommandBase
from .common import (
    load_candidate,
    load_optional_weights,
    load_programs,
    pool_size,
    read_campaign,
    reference_factory,
)

logger = logging.getLogger(__name__)


class RepairCommand(CommandBase):
    name = "repair"
    summary = "Refine a candidate config until it matches the reference"
    description = (
        "Scores the candidate over the program set, asks the synthesizer (builtin, or an "
        "external command given with --synth) for a better config, keeps only strict "
        "improvements. Writes the history and the final config as candidate-v<N>.json. "
        "Exit 0 on convergence, 1 otherwise."
    )

    def synthesizer(self) -> Synthesizer:
        if self.config.synth:
            return ExternalSynthesizer(self.config.synth, timeout=self.config.timeout_secs)
        return BuiltinSynthesizer()

    def programs(self) -> list[Program]:
        if self.config.program:
            return [load_program(self.config.program, self.config.load_address)]
        if self.config.programs_dir:
            return load_programs(self.config)
        # 默认使用全部 knob 的见证程序
        return witness_programs()

    def fault_evaluator(self, make_reference):
        """Campaign contribution to each evaluation when --campaign and --program are given."""
        if not (self.config.campaign and self.config.program):
            return None
        campaign = read_campaign(self.config.campaign)
        program = load_program(self.config.program, self.config.load_address)
        workers = pool_size(self.config)

        async def evaluate_faults(config: CandidateConfig) -> float:
            report = await run_fault_campaign(program, campaign, config, make_reference, workers)
            return report.fault_response_divergence

        return evaluate_faults

    async def do_command_async(self) -> int:
        config = self.config
        initial = load_candidate(config)
        programs = self.programs()
        make_reference = reference_factory(config)
        synthesizer = self.synthesizer()
        self.context.notification_display.info(
            f"Repairing {initial.label()} over {len(programs)} program(s) with the "
            f"{synthesizer.name} synthesizer, at most {config.max_iters} iteration(s)"
        )

        final, history = await repair_loop(
            initial,
            synthesizer,
            programs,
            config.max_iters,
            weights=load_optional_weights(config),
            max_steps=config.max_steps,
            make_reference=make_reference,
            fault_evaluator=self.fault_evaluator(make_reference),
            workers=pool_size(config),
        )

        self.context.write_artifact("repair/history.json", "repair_history", history.model_dump(mode="json"))
        path = self.write_final_config(final)
        self.context.report_display.repair(history)
        self.context.notification_display.info(f"Final config {final.label()} written to {path}")

        if history.stop_reason == "converged":
            self.context.notification_display.success(
                f"Converged after {len(history.iterations)} iteration(s)"
            )
            return EXIT_CLEAN
        self.context.notification_display.warning(f"Stopped: {history.stop_reason}")
        return EXIT_DIVERGED

    def write_final_config(self, final: CandidateConfig, relative: Optional[str] = None):
        # 读取时 from_document 忽略 harness_config
        doc = {**final.to_document(), "harness_config": self.config.document()}
        path = self.context.out_path(relative or f"repair/candidate-v{final.version}.json")
        if self.config.candidate and path.resolve() == Path(self.config.candidate).resolve():
            # 未接受任何修改，输入文件原样保留
            return path
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        return path
