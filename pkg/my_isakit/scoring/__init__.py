# coding=utf-8
#
# scoring 包
# 保真度评分、修复反馈与生成、评估、修订循环
#

from .areas import AREA_KNOBS, classify, knobs_for_area, states_before, step_views
from .errors import InvalidWeights, ScoringError, SynthesizerFailure
from .feedback import (
    FeedbackEntry,
    FeedbackReport,
    feedback_entries,
    merge_feedback,
    render_feedback,
)
from .repair import (
    Evaluation,
    RepairHistory,
    RepairIteration,
    evaluate,
    repair_loop,
    save_history,
)
from .score import FidelityScore, score, score_runs
from .synthesizer import (
    BuiltinSynthesizer,
    ExternalSynthesizer,
    Synthesizer,
    exchange_document,
)
from .weights import DIMENSIONS, Weights, load_weights, weights_from_document

__all__ = [
    "AREA_KNOBS",
    "classify",
    "knobs_for_area",
    "states_before",
    "step_views",
    "InvalidWeights",
    "ScoringError",
    "SynthesizerFailure",
    "FeedbackEntry",
    "FeedbackReport",
    "feedback_entries",
    "merge_feedback",
    "render_feedback",
    "Evaluation",
    "RepairHistory",
    "RepairIteration",
    "evaluate",
    "repair_loop",
    "save_history",
    "FidelityScore",
    "score",
    "score_runs",
    "BuiltinSynthesizer",
    "ExternalSynthesizer",
    "Synthesizer",
    "exchange_document",
    "DIMENSIONS",
    "Weights",
    "load_weights",
    "weights_from_document",
]
