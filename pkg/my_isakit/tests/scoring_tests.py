# coding=utf-8
#
# scoring_tests.py
# 权重、保真度评分与修复反馈
#

import json
import logging
import math

import pytest

from my_isakit.candidate import CandidateConfig, Knob, negative_compare_program, witness_program
from my_isakit.diff import Discrepancy, DiscrepancyClass, RunReport
from my_isakit.scoring import (
    DIMENSIONS,
    BuiltinSynthesizer,
    InvalidWeights,
    Weights,
    exchange_document,
    load_weights,
    merge_feedback,
    render_feedback,
    score,
    score_runs,
    weights_from_document,
)
from .conftest import run_pair

logger = logging.getLogger(__name__)


def test_default_weights_are_equal():
    weights = Weights()
    assert list(weights.as_dict()) == list(DIMENSIONS)
    assert all(math.isclose(w, 1 / 6) for w in weights.as_dict().values())


def test_invalid_weights_are_rejected():
    with pytest.raises(InvalidWeights):
        Weights.create(register_trace_delta=0.5)
    with pytest.raises(InvalidWeights):
        Weights.from_vector([1.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(InvalidWeights):
        Weights.from_vector([1.5, -0.5, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(InvalidWeights):
        weights_from_document({"register_trace_delta": 1.0, "bogus": 0.0})
    with pytest.raises(InvalidWeights):
        weights_from_document("equal")


def test_weights_from_vector_and_file(tmp_path):
    weights = Weights.from_vector([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])
    assert weights.register_trace_delta == 0.5
    path = tmp_path / "weights.json"
    path.write_text(json.dumps(weights.as_dict()), encoding="utf-8")
    assert load_weights(path) == weights
    path.write_text("{", encoding="utf-8")
    with pytest.raises(InvalidWeights):
        load_weights(path)


def test_fault_weight_is_redistributed_without_campaign():
    weights = Weights.from_vector([0.4, 0.2, 0.1, 0.1, 0.1, 0.1])
    effective = weights.effective(False)
    assert effective["fault_response_divergence"] == 0.0
    assert math.isclose(sum(effective.values()), 1.0)
    assert math.isclose(effective["register_trace_delta"], 0.4 + 0.1 * 0.4 / 0.9)
    assert weights.effective(True) == weights.as_dict()


@pytest.mark.asyncio
async def test_clean_run_scores_zero():
    report = await run_pair(witness_program(Knob.CARRY_INVERTED), [], 16)
    fidelity = score(report)
    assert fidelity.aggregate == 0.0
    assert fidelity.perfect
    assert all(v == 0.0 for v in fidelity.dimensions().values())
    assert score(report, fault_metrics=0.0).perfect


@pytest.mark.asyncio
async def test_negative_compare_scores_above_zero():
    report = await run_pair(negative_compare_program(), ["cmp_skips_n_update"], 10)
    fidelity = score(report)
    assert 0 < fidelity.aggregate <= 1
    assert fidelity.discrepancy_count == 1
    # 1 flag cell over 3 steps × 5 transition cells
    assert math.isclose(fidelity.state_transition_mismatch, 1 / 15)
    assert fidelity.register_trace_delta == 0.0
    assert math.isclose(fidelity.aggregate, fidelity.state_transition_mismatch / 5)

    with_faults = score(report, fault_metrics=1.0)
    assert with_faults.fault_response_divergence == 1.0
    assert with_faults.aggregate > fidelity.aggregate


@pytest.mark.asyncio
async def test_score_runs_averages_dimensions():
    clean = await run_pair(witness_program(Knob.PC_STEP_8), [], 16)
    dirty = await run_pair(negative_compare_program(), ["cmp_skips_n_update"], 10)
    combined = score_runs([clean, dirty])
    assert combined.runs == 2
    assert math.isclose(combined.state_transition_mismatch, score(dirty).state_transition_mismatch / 2)
    assert score_runs([]).runs == 0


@pytest.mark.asyncio
async def test_negative_compare_feedback_text():
    report = await run_pair(negative_compare_program(), ["cmp_skips_n_update"], 10)
    fidelity = score(report)
    feedback = render_feedback(report, fidelity)
    assert feedback.total == 1
    entry = feedback.entries[0]
    assert entry.disassembly == "CMP R0, R1"
    assert "CMP R0, R1 results in -10" in entry.text
    assert "the N flag should be set (N=1)" in entry.text
    assert "left it at 0" in entry.text
    assert entry.area == "compare-n-flag"
    assert feedback.score == fidelity
    assert "step 2" in feedback.render_text()


@pytest.mark.asyncio
async def test_feedback_truncates_and_summarises():
    report = await run_pair(witness_program(Knob.PC_STEP_8), ["pc_step_8"], 32)
    feedback = render_feedback(report, limit=2)
    assert len(feedback.entries) == 2
    assert feedback.truncated == feedback.total - 2
    assert "more discrepancies not shown" in feedback.render_text()

    clean = await run_pair(witness_program(Knob.PC_STEP_8), [], 12)
    assert render_feedback(clean).summary == "no divergence over 12 steps"
    assert render_feedback(clean).empty


@pytest.mark.asyncio
async def test_merge_feedback_over_program_set():
    clean = await run_pair(witness_program(Knob.CARRY_INVERTED), [], 8)
    assert merge_feedback([clean, clean]).summary == "no divergence over 2 programs"

    dirty = await run_pair(negative_compare_program(), ["cmp_skips_n_update"], 10)
    merged = merge_feedback([clean, dirty])
    assert merged.total == 1
    assert merged.entries[0].program_digest == dirty.program_digest
    assert merged.program_digests == [clean.program_digest, dirty.program_digest]


@pytest.mark.asyncio
@pytest.mark.parametrize(
    "knob, area",
    [
        (Knob.STR_WRITES_BIG_ENDIAN, "store"),
        (Knob.BRANCH_OFFSET_OFF_BY_4, "branch-target"),
        (Knob.PC_STEP_8, "pc-sequential"),
        (Knob.COND_EQ_NE_SWAPPED, "condition"),
        (Knob.RESET_SKIPS_REGFILE, "reset"),
        (Knob.LDR_SIGN_EXTENDS_HALFWORD, "load"),
    ],
)
async def test_first_feedback_area_points_at_the_knob(knob, area):
    report = await run_pair(witness_program(knob), [knob.value], 32)
    assert render_feedback(report).entries[0].area == area


@pytest.mark.asyncio
async def test_builtin_synthesizer_choice():
    config = CandidateConfig.from_names(["carry_inverted", "cmp_skips_n_update"])
    report = await run_pair(negative_compare_program(), config, 10)
    feedback = render_feedback(report)
    synthesizer = BuiltinSynthesizer()
    assert synthesizer.choose(config, feedback) is Knob.CMP_SKIPS_N_UPDATE

    rejected = frozenset({frozenset({Knob.CARRY_INVERTED})})
    assert synthesizer.choose(config, feedback, rejected) is Knob.CARRY_INVERTED

    proposal = await synthesizer.propose(config, feedback, score(report))
    assert proposal.ordered_knobs == [Knob.CARRY_INVERTED]

    clean = await run_pair(negative_compare_program(), [], 10)
    assert synthesizer.choose(config, render_feedback(clean)) is None


@pytest.mark.asyncio
async def test_exchange_document_shape():
    config = CandidateConfig.from_names(["pc_step_8"], version=4)
    report = await run_pair(witness_program(Knob.PC_STEP_8), config, 8)
    fidelity = score(report)
    doc = exchange_document(config, render_feedback(report, fidelity), fidelity, {frozenset({Knob.PC_STEP_8})})
    assert doc["config"]["version"] == 4
    assert doc["rejected"] == [["pc_step_8"]]
    assert doc["score"]["aggregate"] == fidelity.aggregate
    json.dumps(doc)


def _with_decode_mismatch(report: RunReport) -> RunReport:
    extra = Discrepancy(
        seq=report.step_count,
        pc=0,
        instr_word=0,
        field="error-class",
        expected="none",
        actual="undefined-instruction",
        category=DiscrepancyClass.DECODE_MISMATCH,
    )
    return report.model_copy(update={"discrepancies": [*report.discrepancies, extra]})


@pytest.mark.asyncio
async def test_extra_discrepancy_never_lowers_the_score():
    reports = [
        await run_pair(witness_program(Knob.CARRY_INVERTED), [], 16),
        await run_pair(negative_compare_program(), ["cmp_skips_n_update"], 10),
        await run_pair(witness_program(Knob.PC_STEP_8), ["pc_step_8"], 32),
        await run_pair(witness_program(Knob.STR_WRITES_BIG_ENDIAN), ["str_writes_big_endian"], 16),
    ]
    for report in reports:
        worse = _with_decode_mismatch(report)
        for fault_metrics in (None, 0.5):
            before = score(report, fault_metrics).dimensions()
            after = score(worse, fault_metrics).dimensions()
            assert all(after[name] >= before[name] for name in DIMENSIONS), report.program_digest
            assert score(worse, fault_metrics).aggregate >= score(report, fault_metrics).aggregate

    clean = reports[0]
    assert score(_with_decode_mismatch(clean)).aggregate > score(clean).aggregate
