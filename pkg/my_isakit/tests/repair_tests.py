# coding=utf-8
#
# repair_tests.py
# 生成、评估、修订循环：内置与外部 synthesizer
#

import itertools
import json
import logging
import random
import sys

import pytest

from my_isakit.candidate import (
    CATALOG,
    WITNESS_BUDGET,
    CandidateConfig,
    Knob,
    negative_compare_program,
    witness_program,
    witness_programs,
)
from my_isakit.scoring import (
    BuiltinSynthesizer,
    ExternalSynthesizer,
    SynthesizerFailure,
    evaluate,
    merge_feedback,
    repair_loop,
    save_history,
    score_runs,
)
from .conftest import scale

logger = logging.getLogger(__name__)


def _external(script: str, timeout: float = 10.0) -> ExternalSynthesizer:
    return ExternalSynthesizer([sys.executable, "-c", script], timeout=timeout)


ECHO = "import json,sys; print(json.dumps(json.load(sys.stdin)['config']))"
DROP_ALL = "import json,sys; json.load(sys.stdin); print(json.dumps({'knobs': {}}))"
UNKNOWN_KNOB = "import sys; sys.stdin.read(); print('{\"knobs\": {\"flux_capacitor\": true}}')"


@pytest.mark.asyncio
async def test_evaluate_scores_the_program_set():
    config = CandidateConfig.from_names(["cmp_skips_n_update"])
    evaluation = await evaluate(config, [negative_compare_program()], max_steps=10)
    assert evaluation.config == config
    assert len(evaluation.reports) == 1
    assert evaluation.score == score_runs(evaluation.reports)
    assert evaluation.feedback == merge_feedback(evaluation.reports, evaluation.score)
    assert not evaluation.score.perfect


@pytest.mark.asyncio
@pytest.mark.parametrize("knob", CATALOG, ids=[k.value for k in CATALOG])
async def test_single_knob_converges(knob):
    initial = CandidateConfig.from_names([knob.value])
    final, history = await repair_loop(
        initial, BuiltinSynthesizer(), [witness_program(knob)], budget=4, max_steps=WITNESS_BUDGET
    )
    assert final.is_golden
    assert history.stop_reason == "converged"
    assert len(history.iterations) <= 2
    assert history.iterations[-1].score == 0.0
    assert history.iterations[-1].version == 1
    assert history.final_config == final.to_document()


@pytest.mark.asyncio
async def test_three_knobs_converge_with_decreasing_scores(tmp_path):
    initial = CandidateConfig.from_names(
        ["cmp_skips_n_update", "carry_inverted", "branch_offset_off_by_4"]
    )
    final, history = await repair_loop(
        initial, BuiltinSynthesizer(), witness_programs(), budget=8, max_steps=WITNESS_BUDGET
    )
    assert final.is_golden
    assert history.stop_reason == "converged"
    scores = history.accepted_scores()
    assert len(scores) >= 2
    assert all(a > b for a, b in zip(scores, scores[1:]))
    assert scores[-1] == 0.0
    assert history.iterations[0].knobs == [k.value for k in initial.ordered_knobs]
    assert history.program_digests == [p.digest for p in witness_programs()]

    path = save_history(history, tmp_path / "repair" / "history.json")
    assert json.loads(path.read_text(encoding="utf-8"))["stop_reason"] == "converged"


@pytest.mark.asyncio
async def test_budget_of_one_only_evaluates():
    initial = CandidateConfig.from_names(["pc_step_8"])
    final, history = await repair_loop(
        initial, BuiltinSynthesizer(), [witness_program(Knob.PC_STEP_8)], budget=1, max_steps=16
    )
    assert final == initial
    assert history.stop_reason == "budget_exhausted"
    assert len(history.iterations) == 1 and history.iterations[0].accepted


@pytest.mark.asyncio
async def test_invalid_budget():
    with pytest.raises(ValueError):
        await repair_loop(CandidateConfig(), BuiltinSynthesizer(), [negative_compare_program()], budget=0)


@pytest.mark.asyncio
async def test_external_synthesizer_can_repair():
    initial = CandidateConfig.from_names(["carry_inverted", "pc_step_8"])
    programs = [witness_program(Knob.CARRY_INVERTED), witness_program(Knob.PC_STEP_8)]
    final, history = await repair_loop(initial, _external(DROP_ALL), programs, budget=3, max_steps=16)
    assert final.is_golden
    assert history.synthesizer == "external"
    assert history.stop_reason == "converged"
    assert len(history.iterations) == 2


@pytest.mark.asyncio
async def test_echoing_synthesizer_means_no_improvement():
    initial = CandidateConfig.from_names(["cmp_skips_n_update"])
    final, history = await repair_loop(initial, _external(ECHO), [negative_compare_program()], budget=3, max_steps=10)
    assert final.same_knobs(initial)
    assert history.stop_reason == "no_improvement"
    assert len(history.iterations) == 1


@pytest.mark.asyncio
async def test_failed_synthesis_consumes_budget():
    initial = CandidateConfig.from_names(["cmp_skips_n_update"])
    final, history = await repair_loop(
        initial, _external(UNKNOWN_KNOB), [negative_compare_program()], budget=3, max_steps=10
    )
    assert final == initial
    assert history.stop_reason == "budget_exhausted"
    errors = [it for it in history.iterations if it.error is not None]
    assert len(errors) == 2
    assert [it.iteration for it in history.iterations] == [1, 2, 3]
    assert "flux_capacitor" in errors[0].error


@pytest.mark.asyncio
async def test_external_synthesizer_failures():
    config = CandidateConfig.from_names(["cmp_skips_n_update"])
    evaluation = await evaluate(config, [negative_compare_program()], max_steps=10)
    args = (evaluation.config, evaluation.feedback, evaluation.score)

    with pytest.raises(SynthesizerFailure):
        await _external("import sys; sys.stdin.read(); sys.exit(3)").propose(*args)
    with pytest.raises(SynthesizerFailure):
        await _external("import sys; sys.stdin.read(); print('not json')").propose(*args)
    with pytest.raises(SynthesizerFailure):
        await _external("import time; time.sleep(5)", timeout=0.3).propose(*args)
    with pytest.raises(SynthesizerFailure):
        await ExternalSynthesizer(["/nonexistent/synthesizer"]).propose(*args)
    with pytest.raises(ValueError):
        ExternalSynthesizer("")


async def _assert_converges(initial: CandidateConfig, programs) -> None:
    k = len(initial.active_knobs)
    final, history = await repair_loop(
        initial, BuiltinSynthesizer(), programs, budget=2 * k, max_steps=WITNESS_BUDGET
    )
    assert final.is_golden, initial.label()
    assert history.stop_reason == "converged", initial.label()
    assert len(history.iterations) <= 2 * k
    scores = history.accepted_scores()
    assert all(a > b for a, b in zip(scores, scores[1:])), initial.label()
    assert scores[-1] == 0.0


@pytest.mark.asyncio
async def test_seeded_configs_converge_within_twice_their_size():
    rng = random.Random(2024)
    programs = witness_programs()
    for _ in range(scale(10, 100)):
        knobs = rng.sample(CATALOG, rng.randint(1, 5))
        await _assert_converges(CandidateConfig(active_knobs=frozenset(knobs)), programs)


@pytest.mark.asyncio
async def test_every_three_knob_subset_converges():
    programs = witness_programs()
    subsets = list(itertools.combinations(CATALOG, 3))
    for knobs in subsets[:: scale(11, 1)]:
        await _assert_converges(CandidateConfig(active_knobs=frozenset(knobs)), programs)
