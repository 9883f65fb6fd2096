# coding=utf-8
#
# candidate_tests.py
#

import itertools
import json
import logging

import pytest

from my_isakit.candidate import (
    CATALOG,
    KNOB_INFO,
    WITNESS_BUDGET,
    CandidateConfig,
    InvalidCandidateConfig,
    Knob,
    UnknownKnob,
    instantiate,
    knob_from_name,
    load_candidate_config,
    power_on_registers,
    save_candidate_config,
    witness_program,
    witness_programs,
)
from my_isakit.isa import generate_programs
from .conftest import run_pair, scale

logger = logging.getLogger(__name__)


def test_catalog_is_complete():
    assert len(CATALOG) >= 10
    assert CATALOG[0] is Knob.CMP_SKIPS_N_UPDATE
    assert set(KNOB_INFO) == set(CATALOG)
    assert {info.expected_class for info in KNOB_INFO.values()} <= {
        "register_mismatch",
        "flag_mismatch",
        "control_flow_mismatch",
        "memory_mismatch",
    }
    assert len(witness_programs()) == len(CATALOG)


def test_unknown_knob_is_rejected():
    assert knob_from_name("carry_inverted") is Knob.CARRY_INVERTED
    with pytest.raises(UnknownKnob):
        knob_from_name("flux_capacitor")
    with pytest.raises(UnknownKnob):
        instantiate(["flux_capacitor"])
    with pytest.raises(ValueError):
        CandidateConfig.from_names(["cmp_skips_n_update", "nope"])


def test_config_document_forms():
    config = CandidateConfig.from_names(["carry_inverted", "cmp_skips_n_update"], version=3)
    assert config.label() == "{cmp_skips_n_update, carry_inverted}"
    doc = config.to_document()
    assert doc["version"] == 3
    assert set(doc["knobs"]) == {k.value for k in CATALOG}
    assert doc["knobs"]["carry_inverted"] is True
    assert doc["knobs"]["pc_step_8"] is False

    again = CandidateConfig.from_document({**doc, "harness_config": {"seed": 1}})
    assert again == config
    listed = CandidateConfig.from_document({"active_knobs": ["carry_inverted"]})
    assert listed.ordered_knobs == [Knob.CARRY_INVERTED]
    assert CandidateConfig().label() == "{}"
    assert CandidateConfig().is_golden


def test_config_flip_and_version():
    config = CandidateConfig.from_names(["pc_step_8"])
    flipped = config.flip(Knob.PC_STEP_8)
    assert flipped.is_golden
    assert flipped.flip(Knob.PC_STEP_8).same_knobs(config)
    assert config.with_version(7).version == 7
    assert config.with_version(7).same_knobs(config)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"knobs": ["carry_inverted"]}',
        '{"knobs": {"carry_inverted": "yes"}}',
        '{"version": -1}',
        '{"active_knobs": "carry_inverted"}',
    ],
)
def test_invalid_config_documents(text):
    with pytest.raises(InvalidCandidateConfig):
        CandidateConfig.from_json(text)


def test_save_and_load_config(tmp_path):
    config = CandidateConfig.from_names(["str_writes_big_endian"], version=2)
    path = save_candidate_config(config, tmp_path / "cfg" / "candidate.json")
    assert json.loads(path.read_text(encoding="utf-8"))["knobs"]["str_writes_big_endian"] is True
    assert load_candidate_config(path) == config


def test_reset_skips_regfile_keeps_power_on_contents():
    model = instantiate(["reset_skips_regfile"])
    model.load(witness_program(Knob.RESET_SKIPS_REGFILE))
    assert model.read_state().regs == power_on_registers()
    assert model.name == "candidate"

    golden = instantiate([])
    golden.load(witness_program(Knob.RESET_SKIPS_REGFILE))
    assert golden.read_state().regs == (0,) * 16


@pytest.mark.asyncio
@pytest.mark.parametrize("knob", CATALOG, ids=[k.value for k in CATALOG])
async def test_witness_detects_knob(knob):
    report = await run_pair(witness_program(knob), [knob.value], WITNESS_BUDGET)
    assert report.diverged, knob.value
    assert report.first_discrepancy.category.value == KNOB_INFO[knob].expected_class


@pytest.mark.asyncio
async def test_zero_knob_candidate_matches_every_witness():
    for program in witness_programs():
        report = await run_pair(program, [], WITNESS_BUDGET)
        assert not report.diverged, program.name
        assert report.stop_reason == "budget_exhausted"


@pytest.mark.asyncio
async def test_adding_knobs_never_hides_a_divergence():
    cases = [(program, WITNESS_BUDGET) for program in witness_programs()]
    cases += [(program, 200) for program in generate_programs(31, scale(2, 20), 200)]
    configs = [frozenset([knob]) for knob in CATALOG]
    configs += [frozenset(pair) for pair in itertools.combinations(CATALOG, 2)]
    for program, budget in cases:
        diverged = {}
        for knobs in configs:
            report = await run_pair(program, CandidateConfig(active_knobs=knobs), budget, mode="fail_fast")
            diverged[knobs] = report.diverged
        for pair in itertools.combinations(CATALOG, 2):
            if any(diverged[frozenset([knob])] for knob in pair):
                assert diverged[frozenset(pair)], (program.name or program.short_digest, pair)


@pytest.mark.parametrize(
    "text",
    [
        '{"version": true}',
        '{"version": "3"}',
        '{"knobs": null}',
        '{"knobs": {"carry_inverted": 1}}',
        '{"active_knobs": [3]}',
    ],
)
def test_config_document_types_are_strict(text):
    with pytest.raises(InvalidCandidateConfig):
        CandidateConfig.from_json(text)


def test_unknown_knob_in_document():
    with pytest.raises(UnknownKnob):
        CandidateConfig.from_document({"knobs": {"carry_inverted": True, "flux_capacitor": False}})
    with pytest.raises(UnknownKnob):
        CandidateConfig.from_document({"active_knobs": ["flux_capacitor"]})
    again = CandidateConfig.from_document({"schema_version": 1, "version": 2, "knobs": {"pc_step_8": True}})
    assert again == CandidateConfig.from_names(["pc_step_8"], version=2)
