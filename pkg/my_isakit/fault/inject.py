# coding=utf-8
#
# inject.py
# 通过端点的写状态接口施加故障
#
# 参考端走 RSP 的 P/M 写操作，候选端走 poke 接口，两条路径产生相同的状态变化。
#

import logging

from ..diff.endpoints import Endpoint
from .spec import FaultSpec

logger = logging.getLogger(__name__)


async def apply_fault(side: Endpoint, spec: FaultSpec) -> None:
    """
    Transform the fault's location on one side, nothing else.

    Raises:
        InvalidLocation: the fault targets a missing location
        RspError: the write failed on an RSP endpoint
    """
    spec.check()
    match spec.space:
        case "register":
            state = await side.read_state()
            await side.poke_register(spec.register, spec.transform(state.regs[spec.register]))
        case "flag":
            state = await side.read_state()
            value = spec.transform(int(state.flags.get(spec.flag)))
            await side.poke_flags(state.flags.with_flag(spec.flag, bool(value)))
        case "memory":
            value = await side.read_word(spec.address)
            await side.poke_word(spec.address, spec.transform(value))
    logger.debug(f"Applied {spec.label()} on {side.name}")


class FaultInjector:
    """Lockstep hook applying one spec to both sides at the same points."""

    def __init__(self, spec: FaultSpec):
        self.spec = spec.check()
        self.applications = 0

    def _due(self, seq: int, sampling: bool) -> bool:
        if self.spec.persistent:
            return seq >= self.spec.trigger_seq
        return not sampling and seq == self.spec.trigger_seq

    async def _apply(self, reference: Endpoint, candidate: Endpoint) -> None:
        await apply_fault(reference, self.spec)
        await apply_fault(candidate, self.spec)
        self.applications += 1

    async def before_step(self, seq: int, reference: Endpoint, candidate: Endpoint) -> None:
        if self._due(seq, sampling=False):
            await self._apply(reference, candidate)

    async def before_sample(self, seq: int, reference: Endpoint, candidate: Endpoint) -> None:
        if self._due(seq, sampling=True):
            await self._apply(reference, candidate)
