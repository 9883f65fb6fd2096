# coding=utf-8
#
# synthesizer.py
# 候选配置的修订者：内置确定性映射，或外部程序（每轮一次 stdin/stdout 文档交换）
#

import json
import logging
import shlex
from abc import ABC, abstractmethod
from typing import AbstractSet, Optional, Sequence

import anyio

from ..candidate.config import CandidateConfig
from ..candidate.errors import InvalidCandidateConfig, UnknownKnob
from ..candidate.knobs import Knob
from .areas import knobs_for_area
from .errors import SynthesizerFailure
from .feedback import FeedbackReport
from .score import FidelityScore

logger = logging.getLogger(__name__)

EXCHANGE_SCHEMA_VERSION = 1
DEFAULT_SYNTH_TIMEOUT_SECS = 30.0


class Synthesizer(ABC):
    name: str = "synthesizer"

    @abstractmethod
    async def propose(
        self,
        config: CandidateConfig,
        feedback: FeedbackReport,
        score: FidelityScore,
        rejected: AbstractSet[frozenset[Knob]] = frozenset(),
    ) -> CandidateConfig:
        """
        Revised config for the next evaluation.

        Raises:
            SynthesizerFailure: no usable proposal could be produced
        """


class BuiltinSynthesizer(Synthesizer):
    """
    Flips one active knob per proposal.

    The earliest feedback entry whose area maps to an active knob decides which;
    otherwise the first active knob in catalog order. Knob sets already rejected
    are never proposed again.
    """

    name = "builtin"

    def choose(
        self,
        config: CandidateConfig,
        feedback: FeedbackReport,
        rejected: AbstractSet[frozenset[Knob]] = frozenset(),
    ) -> Optional[Knob]:
        if feedback.empty:
            return None

        def acceptable(knob: Knob) -> bool:
            return (
                knob in config.active_knobs
                and config.flip(knob).active_knobs not in rejected
            )

        for entry in feedback.entries:
            for knob in knobs_for_area(entry.area):
                if acceptable(knob):
                    return knob
        for knob in config.ordered_knobs:
            if acceptable(knob):
                return knob
        return None

    async def propose(self, config, feedback, score, rejected=frozenset()) -> CandidateConfig:
        knob = self.choose(config, feedback, rejected)
        if knob is None:
            return config
        logger.debug(f"Builtin synthesizer flips {knob.value}")
        return config.flip(knob)


def exchange_document(
    config: CandidateConfig,
    feedback: FeedbackReport,
    score: FidelityScore,
    rejected: AbstractSet[frozenset[Knob]] = frozenset(),
) -> dict:
    """The document written to an external synthesizer's stdin."""
    return {
        "schema_version": EXCHANGE_SCHEMA_VERSION,
        "config": config.to_document(),
        "feedback": feedback.model_dump(mode="json"),
        "score": score.model_dump(mode="json"),
        "rejected": sorted(sorted(k.value for k in knobs) for knobs in rejected),
    }


class ExternalSynthesizer(Synthesizer):
    """
    Runs ``command`` once per proposal; the exchange document goes in on stdin and a
    candidate config document is read back from stdout.
    """

    name = "external"

    def __init__(self, command: str | Sequence[str], timeout: float = DEFAULT_SYNTH_TIMEOUT_SECS):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise ValueError("external synthesizer command is empty")
        self.timeout = timeout

    async def propose(self, config, feedback, score, rejected=frozenset()) -> CandidateConfig:
        payload = json.dumps(exchange_document(config, feedback, score, rejected)).encode("utf-8")
        try:
            with anyio.fail_after(self.timeout):
                result = await anyio.run_process(self.command, input=payload, check=False)
        except TimeoutError as exc:
            raise SynthesizerFailure(f"synthesizer timed out after {self.timeout}s") from exc
        except OSError as exc:
            raise SynthesizerFailure(f"cannot start synthesizer {self.command[0]}: {exc}") from exc

        if result.returncode != 0:
            stderr = result.stderr.decode("utf-8", "replace").strip()
            raise SynthesizerFailure(f"synthesizer exited with {result.returncode}: {stderr}")
        try:
            proposal = CandidateConfig.from_json(result.stdout.decode("utf-8"))
        except (UnknownKnob, InvalidCandidateConfig, UnicodeDecodeError) as exc:
            raise SynthesizerFailure(f"unusable synthesizer output: {exc}") from exc
        return proposal
