# coding=utf-8
#
# lockstep.py
# 锁步差分运行：参考单步 → 读状态 → 候选单步 → 比较
#

import logging
from typing import Awaitable, Callable, Iterable, Optional, Protocol, Sequence

import anyio

from ..candidate.config import CandidateConfig
from ..candidate.model import CandidateModel
from ..isa.errors import IsaError
from ..isa.program import Program
from ..isa.types import TraceEvent
from ..rsp.errors import RspError
from .compare import compare_memory, compare_states, fault_discrepancy
from .endpoints import CandidateEndpoint, Endpoint, MachineEndpoint
from .errors import LockstepError, SetupMismatch
from .types import Discrepancy, FaultRecord, RunMode, RunReport, StopReason

logger = logging.getLogger(__name__)


class StepHook(Protocol):
    """Called around every step; the fault injector implements this."""

    async def before_step(self, seq: int, reference: Endpoint, candidate: Endpoint) -> None: ...

    async def before_sample(self, seq: int, reference: Endpoint, candidate: Endpoint) -> None: ...


def as_endpoint(candidate: Endpoint | CandidateModel | CandidateConfig) -> Endpoint:
    if isinstance(candidate, Endpoint):
        return candidate
    if isinstance(candidate, CandidateConfig):
        return CandidateEndpoint(candidate)
    return MachineEndpoint(candidate, "candidate")


async def verify_setup(reference: Endpoint, candidate: Endpoint, program: Program) -> None:
    """
    Both sides must start at the same pc over the same image.

    Raises:
        SetupMismatch: listing every difference found
    """
    differences = []
    ref_state = await reference.read_state()
    cand_state = await candidate.read_state()
    if ref_state.pc != cand_state.pc:
        differences.append(f"pc 0x{ref_state.pc:08x} != 0x{cand_state.pc:08x}")
    base, size = program.image.base, program.image.size
    expected = program.image.snapshot()
    if await reference.read_image(base, size) != expected:
        differences.append("reference image differs from program")
    if await candidate.read_image(base, size) != expected:
        differences.append("candidate image differs from program")
    if differences:
        raise SetupMismatch(differences)


async def _step_side(endpoint: Endpoint, seq: int) -> tuple[Optional[TraceEvent], Optional[IsaError]]:
    try:
        return await endpoint.step(seq), None
    except IsaError as exc:
        return None, exc
    except (RspError, OSError) as exc:
        raise LockstepError(f"{endpoint.name}: {exc}", seq) from exc


async def lockstep_run(
    reference: Endpoint,
    candidate: Endpoint | CandidateModel | CandidateConfig,
    program: Program,
    budget: int,
    mode: RunMode = "run_to_budget",
    mask: Optional[Iterable[str]] = None,
    hook: Optional[StepHook] = None,
    candidate_config: Optional[CandidateConfig] = None,
) -> RunReport:
    """
    Run reference and candidate side by side for up to ``budget`` steps.

    Faults: the same fault on both sides ends the run as ``completed``; a fault on
    one side only is a decode_mismatch and ends the run as ``error`` (or
    ``first_divergence`` in fail_fast mode).

    Raises:
        SetupMismatch: the two sides did not load to the same pc and image
        LockstepError: protocol or transport failure, annotated with the step
    """
    candidate = as_endpoint(candidate)
    if candidate_config is None and isinstance(candidate, CandidateEndpoint):
        candidate_config = candidate.config
    mask = None if mask is None else frozenset(mask)

    try:
        await reference.load(program)
        await candidate.load(program)
        await verify_setup(reference, candidate, program)
        ref_initial = await reference.read_state()
        cand_initial = await candidate.read_state()
    except (RspError, OSError) as exc:
        raise LockstepError(f"setup failed: {exc}") from exc

    ref_trace: list[TraceEvent] = []
    cand_trace: list[TraceEvent] = []
    discrepancies: list[Discrepancy] = []
    written: set[int] = set()
    ref_fault = cand_fault = None
    stop: StopReason = "budget_exhausted"
    steps = 0

    for seq in range(budget):
        try:
            if hook is not None:
                await hook.before_step(seq, reference, candidate)
        except (RspError, OSError) as exc:
            raise LockstepError(f"fault injection failed: {exc}", seq) from exc

        ref_state_before = await reference.read_state()
        ref_event, ref_exc = await _step_side(reference, seq)
        cand_event, cand_exc = await _step_side(candidate, seq)

        if ref_exc is not None or cand_exc is not None:
            pc = ref_exc.pc if ref_exc is not None and ref_exc.pc is not None else ref_state_before.pc
            if ref_exc is not None:
                ref_fault = FaultRecord(seq=seq, pc=pc, kind=ref_exc.kind)
            if cand_exc is not None:
                cand_pc = cand_exc.pc if cand_exc.pc is not None else pc
                cand_fault = FaultRecord(seq=seq, pc=cand_pc, kind=cand_exc.kind)
            if ref_exc is not None and cand_exc is not None and ref_exc.kind == cand_exc.kind:
                stop = "completed"
                break
            if ref_event is not None:
                ref_trace.append(ref_event)
            if cand_event is not None:
                cand_trace.append(cand_event)
            survivor = ref_event or cand_event
            discrepancies.append(
                fault_discrepancy(
                    ref_fault.kind if ref_fault else None,
                    cand_fault.kind if cand_fault else None,
                    seq=seq,
                    pc=pc,
                    instr_word=survivor.instr_word if survivor else 0,
                )
            )
            logger.debug(f"Asymmetric fault at step {seq}: ref={ref_fault} cand={cand_fault}")
            stop = "first_divergence" if mode == "fail_fast" else "error"
            break

        assert ref_event is not None and cand_event is not None
        ref_trace.append(ref_event)
        cand_trace.append(cand_event)
        steps += 1

        try:
            if hook is not None:
                await hook.before_sample(seq, reference, candidate)
            ref_state = await reference.read_state()
            cand_state = await candidate.read_state()
            written.update(addr for addr, _ in ref_event.mem_writes)
            written.update(addr for addr, _ in cand_event.mem_writes)
            ref_words = {addr: await reference.read_word(addr) for addr in written}
            cand_words = {addr: await candidate.read_word(addr) for addr in written}
        except (RspError, OSError) as exc:
            raise LockstepError(f"state read failed: {exc}", seq) from exc

        context = dict(seq=seq, pc=ref_event.pc, instr_word=ref_event.instr_word)
        found = compare_states(ref_state, cand_state, mask, **context)
        found += compare_memory(ref_words, cand_words, mask, **context)
        discrepancies.extend(found)
        if found and mode == "fail_fast":
            stop = "first_divergence"
            break

    report = RunReport(
        program_digest=program.digest,
        program_base=program.image.base,
        program_entry=program.entry,
        program_size=program.image.size,
        budget=budget,
        mode=mode,
        step_count=steps,
        stop_reason=stop,
        discrepancies=discrepancies,
        reference_trace=ref_trace,
        candidate_trace=cand_trace,
        reference_initial=ref_initial,
        candidate_initial=cand_initial,
        reference_fault=ref_fault,
        candidate_fault=cand_fault,
        candidate_config=candidate_config.to_document() if candidate_config else None,
    )
    logger.debug(
        f"Lockstep {program.short_digest}: {steps} steps, {len(discrepancies)} discrepancies, {stop}"
    )
    return report


EndpointFactory = Callable[[Program], Awaitable[Endpoint]]


async def run_many(
    programs: Sequence[Program],
    make_reference: EndpointFactory,
    make_candidate: EndpointFactory,
    budget: int,
    mode: RunMode = "run_to_budget",
    workers: int = 4,
    mask: Optional[Iterable[str]] = None,
) -> list[RunReport | Exception]:
    """
    Independent lockstep runs with at most ``workers`` in flight.

    Results come back in input order whatever the pool size; a failed run yields
    its exception in place of a report.
    """
    results: list[RunReport | Exception] = [RuntimeError("not run")] * len(programs)
    limiter = anyio.CapacityLimiter(max(1, workers))

    async def run_one(index: int, program: Program) -> None:
        async with limiter:
            reference = candidate = None
            try:
                reference = await make_reference(program)
                candidate = await make_candidate(program)
                results[index] = await lockstep_run(reference, candidate, program, budget, mode, mask)
            except Exception as exc:  # noqa: BLE001
                logger.error(f"Run of {program.name or program.short_digest} failed: {exc}")
                results[index] = exc
            finally:
                for endpoint in (candidate, reference):
                    if endpoint is not None:
                        await endpoint.close()

    async with anyio.create_task_group() as tg:
        for index, program in enumerate(programs):
            tg.start_soon(run_one, index, program)
    return results
