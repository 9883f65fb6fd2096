# coding=utf-8
#
# fault_tests.py
# 故障规格校验、注入时机与故障活动
#

import logging

import pytest

from my_isakit.candidate import CandidateConfig, Knob, witness_program
from my_isakit.diff import GoldenEndpoint
from my_isakit.fault import (
    FaultCampaign,
    FaultInjector,
    FaultSpec,
    InvalidCampaign,
    InvalidLocation,
    apply_fault,
    campaign_from_json,
    generate_campaign,
    load_campaign,
    run_fault_campaign,
    save_campaign,
)
from .conftest import program_from_source, run_pair, scale

logger = logging.getLogger(__name__)


@pytest.mark.parametrize(
    "spec",
    [
        FaultSpec(space="register", kind="bitflip", register=16),
        FaultSpec(space="register", kind="bitflip"),
        FaultSpec(space="register", kind="bitflip", register=0, bit=32),
        FaultSpec(space="flag", kind="stuck_at_1", flag="Q"),
        FaultSpec(space="memory", kind="stuck_at_0", address=0x102),
        FaultSpec(space="memory", kind="bitflip"),
        FaultSpec(space="register", kind="bitflip", register=0, trigger_seq=-1),
    ],
)
def test_invalid_locations(spec):
    with pytest.raises(InvalidLocation):
        spec.check()


def test_transform_and_label():
    flip = FaultSpec(space="register", kind="bitflip", register=3, bit=4, trigger_seq=2)
    assert flip.transform(0) == 0x10
    assert flip.transform(0x10) == 0
    assert not flip.persistent
    assert flip.label() == "bitflip R3[4] @ 2"
    assert FaultSpec(space="flag", kind="stuck_at_0", flag="C").transform(1) == 0
    stuck = FaultSpec(space="memory", kind="stuck_at_1", address=0x100, bit=31)
    assert stuck.transform(0) == 0x80000000
    assert stuck.persistent
    assert stuck.label() == "stuck_at_1 mem[0x00000100][31] @ 0"


@pytest.mark.asyncio
async def test_apply_fault_touches_only_its_location():
    program = program_from_source(["MOV R0, #10", "MOV R1, #20"])
    endpoint = GoldenEndpoint()
    await endpoint.load(program)
    before = await endpoint.read_state()
    await apply_fault(endpoint, FaultSpec(space="register", kind="bitflip", register=0, bit=0))
    await apply_fault(endpoint, FaultSpec(space="flag", kind="stuck_at_1", flag="V"))
    await apply_fault(endpoint, FaultSpec(space="memory", kind="stuck_at_1", address=0x104, bit=8))
    after = await endpoint.read_state()
    assert after.regs[0] == before.regs[0] ^ 1
    assert after.regs[1:] == before.regs[1:]
    assert after.flags.v and not after.flags.n
    assert await endpoint.read_word(0x104) == 0x100
    assert await endpoint.read_word(0x100) == 0


@pytest.mark.asyncio
async def test_bitflip_hits_both_sides_once():
    program = program_from_source(["MOV R0, #10", "MOV R1, #20", "ADD R2, R0, R1"])
    injector = FaultInjector(FaultSpec(space="register", kind="bitflip", register=0, bit=0, trigger_seq=1))
    report = await run_pair(program, [], 6, hook=injector)
    assert not report.diverged
    assert injector.applications == 1
    # ADD sees the flipped R0 on both sides
    add = report.reference_trace[2]
    assert add.regs_written == [(2, 31)]
    assert report.candidate_trace[2] == add


@pytest.mark.asyncio
async def test_stuck_at_is_reasserted_every_step():
    program = program_from_source(["MOV R0, #1", "CMP R0, #1", "MOVEQ R1, #5"])
    injector = FaultInjector(FaultSpec(space="flag", kind="stuck_at_0", flag="Z", trigger_seq=0))
    report = await run_pair(program, [], 4, hook=injector)
    assert not report.diverged
    # before every step and every sample
    assert injector.applications == 2 * 4
    assert not report.reference_trace[2].executed
    # the CMP itself still reports Z set
    assert report.reference_trace[1].flags.z


@pytest.mark.asyncio
async def test_golden_candidate_never_diverges_under_faults():
    program = witness_program(Knob.LDR_SIGN_EXTENDS_HALFWORD)
    campaign = generate_campaign(program, 11, scale(20, 200), budget=32)
    report = await run_fault_campaign(program, campaign, CandidateConfig())
    assert len(report.results) == len(campaign.specs)
    assert report.errors == 0
    assert report.diverged == 0
    assert report.fault_response_divergence == 0.0


@pytest.mark.asyncio
async def test_faulty_candidate_diverges_under_faults():
    program = witness_program(Knob.CMP_SKIPS_N_UPDATE)
    campaign = generate_campaign(program, 3, 12, budget=16)
    report = await run_fault_campaign(program, campaign, CandidateConfig.from_names(["cmp_skips_n_update"]))
    assert report.diverged > 0
    assert 0 < report.fault_response_divergence <= 1
    assert [r.index for r in report.results] == list(range(12))
    assert report.results[0].report.fault_spec == campaign.specs[0].model_dump(mode="json")


@pytest.mark.asyncio
async def test_campaign_is_deterministic():
    program = witness_program(Knob.STR_WRITES_BIG_ENDIAN)
    first = generate_campaign(program, 42, 16, budget=24)
    assert first == generate_campaign(program, 42, 16, budget=24)
    assert first != generate_campaign(program, 43, 16, budget=24)
    assert all(spec.trigger_seq < 24 for spec in first.specs)

    config = CandidateConfig.from_names(["str_writes_big_endian"])
    one = await run_fault_campaign(program, first, config, workers=1)
    two = await run_fault_campaign(program, first, config, workers=4)
    assert one.to_json() == two.to_json()


@pytest.mark.asyncio
async def test_campaign_checks():
    program = witness_program(Knob.PC_STEP_8)
    late = FaultCampaign(
        budget=4, specs=[FaultSpec(space="register", kind="bitflip", register=0, trigger_seq=4)]
    )
    with pytest.raises(InvalidCampaign):
        late.check()

    other = generate_campaign(witness_program(Knob.CARRY_INVERTED), 1, 2, budget=8)
    with pytest.raises(InvalidCampaign):
        await run_fault_campaign(program, other, CandidateConfig())

    with pytest.raises(InvalidCampaign):
        campaign_from_json('{"schema_version": 2}')
    with pytest.raises(InvalidCampaign):
        campaign_from_json('{"specs": [{"space": "cache", "kind": "bitflip"}]}')


def test_save_and_load_campaign(tmp_path):
    program = witness_program(Knob.OVERFLOW_ALWAYS_CLEAR)
    campaign = generate_campaign(program, 7, 5, budget=20)
    path = save_campaign(campaign, tmp_path / "faults" / "campaign.json")
    assert load_campaign(path) == campaign
