# coding=utf-8
#
# metrics.py
# 轨迹差异指标：寄存器/内存写入/状态转移/时序
#

from typing import Optional, Sequence

from ..isa.types import NUM_REGS, PC, ArchState, TraceEvent
from .types import FLAG_FIELDS, TraceDeltaMetrics


def _replay_registers(initial: Optional[ArchState], trace: Sequence[TraceEvent]) -> list[list[int]]:
    """Register file after every event, R15 taken from next_pc."""
    regs = list(initial.regs) if initial is not None else [0] * NUM_REGS
    out = []
    for event in trace:
        for index, value in event.regs_written:
            regs[index] = value
        regs[PC] = event.next_pc
        out.append(list(regs))
    return out


def trace_delta(
    ref_trace: Sequence[TraceEvent],
    cand_trace: Sequence[TraceEvent],
    ref_initial: Optional[ArchState] = None,
    cand_initial: Optional[ArchState] = None,
) -> TraceDeltaMetrics:
    """
    Compare two traces of the same program cell by cell over their common prefix.

    Events past the shorter trace count as transition mismatches. Flags are counted
    separately from the pc transitions.
    """
    common = min(len(ref_trace), len(cand_trace))
    ref_regs = _replay_registers(ref_initial, ref_trace[:common])
    cand_regs = _replay_registers(cand_initial, cand_trace[:common])

    register_cells = memory_cells = flag_cells = transitions = 0
    for seq in range(common):
        ref, cand = ref_trace[seq], cand_trace[seq]
        register_cells += sum(1 for a, b in zip(ref_regs[seq], cand_regs[seq]) if a != b)

        ref_writes, cand_writes = dict(ref.mem_writes), dict(cand.mem_writes)
        for addr in ref_writes.keys() | cand_writes.keys():
            if ref_writes.get(addr) != cand_writes.get(addr):
                memory_cells += 1

        flag_cells += sum(1 for name in FLAG_FIELDS if ref.flags.get(name) != cand.flags.get(name))
        if (ref.pc, ref.next_pc) != (cand.pc, cand.next_pc):
            transitions += 1
    transitions += abs(len(ref_trace) - len(cand_trace))

    locations = {addr for event in (*ref_trace, *cand_trace) for addr, _ in event.mem_writes}
    ref_cycles = sum(event.cycles for event in ref_trace)
    cand_cycles = sum(event.cycles for event in cand_trace)

    return TraceDeltaMetrics(
        steps=max(len(ref_trace), len(cand_trace)),
        register_delta_count=register_cells,
        memory_delta_count=memory_cells,
        memory_locations=len(locations),
        flag_delta_count=flag_cells,
        transition_mismatches=transitions,
        timing_deviation=abs(ref_cycles - cand_cycles) / max(1, ref_cycles),
    )


def resource_profile(trace: Sequence[TraceEvent]) -> tuple[int, int]:
    """(executed instruction count, distinct written word addresses)"""
    executed = sum(1 for event in trace if event.executed)
    footprint = len({addr for event in trace for addr, _ in event.mem_writes})
    return executed, footprint
