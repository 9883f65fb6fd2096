# coding=utf-8
#
# session.py
# RSP 客户端会话：驱动外部参考模拟器（或回环的 stub）
#
# 严格串行：同一时刻最多一个未完成的命令；并发调用在发送任何字节之前被拒绝。
# ack 模式始终开启：收到 '-' 时重发，收到校验和错误的回复时发送 '-' 等待重发。
#

import asyncio
import logging
from dataclasses import dataclass
from typing import Optional

from ..isa.types import ArchState
from .codec import (
    ACK,
    NAK,
    Ack,
    Incomplete,
    Nak,
    Packet,
    frame,
    frame_end,
    hex_le32,
    parse,
    parse_error_code,
    parse_hex_le,
)
from .errors import (
    BadChecksum,
    ProtocolTimeout,
    RspError,
    SessionBusy,
    TargetError,
    UnexpectedReply,
)
from .layout import RegisterLayout
from .transcript import Transcript

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_SECS = 5.0
SIGTRAP = 5


def parse_endpoint(endpoint: str) -> tuple[str, int]:
    """
    Split ``host:port``.

    Raises:
        ValueError: not of the form host:port with a valid port
    """
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host or not port.isdigit() or not 0 < int(port) < 65536:
        raise ValueError(f"endpoint must be host:port, got {endpoint!r}")
    return host.strip("[]"), int(port)


@dataclass(frozen=True)
class StopReply:
    """Parsed ``S``/``T``/``W``/``X`` stop reply."""

    kind: str
    signal: int
    pc: Optional[int] = None

    @property
    def exited(self) -> bool:
        return self.kind in ("W", "X")

    @classmethod
    def parse(cls, payload: bytes, pc_index: int = 15) -> "StopReply":
        """
        Raises:
            UnexpectedReply: not a stop reply
        """
        text = payload.decode("latin-1")
        if len(text) < 3 or text[0] not in "STWX":
            raise UnexpectedReply("stop", payload)
        try:
            signal = int(text[1:3], 16)
        except ValueError:
            raise UnexpectedReply("stop", payload) from None
        pc = None
        if text[0] == "T":
            for item in text[3:].split(";"):
                key, _, value = item.partition(":")
                try:
                    if key and value and int(key, 16) == pc_index:
                        pc = parse_hex_le(value)
                except ValueError:
                    continue
        return cls(text[0], signal, pc)


class RspSession:
    """
    Single-owner client session over an asyncio stream pair.

    Args:
        reader / writer: connected stream pair
        layout: register numbering, the classic ARM layout by default
        timeout: seconds allowed per command (request, ack and reply)
        transcript: optional raw frame recorder
    """

    def __init__(
        self,
        reader: asyncio.StreamReader,
        writer: asyncio.StreamWriter,
        layout: Optional[RegisterLayout] = None,
        timeout: float = DEFAULT_TIMEOUT_SECS,
        transcript: Optional[Transcript] = None,
        max_retransmits: int = 3,
    ):
        self.reader = reader
        self.writer = writer
        self.layout = layout or RegisterLayout.default_arm()
        self.timeout = timeout
        self.transcript = transcript
        self.max_retransmits = max_retransmits
        self.ack_mode = True
        self._buffer = bytearray()
        self._busy = False
        self._closed = False
        self.commands_sent = 0
        self.retransmits = 0

    @classmethod
    async def connect(
        cls,
        endpoint: str,
        layout: Optional[RegisterLayout] = None,
        timeout: float = DEFAULT_TIMEOUT_SECS,
        transcript: Optional[Transcript] = None,
    ) -> "RspSession":
        """
        Raises:
            ProtocolTimeout: the connection was not established in time
            OSError: connection refused
        """
        host, port = parse_endpoint(endpoint)
        try:
            reader, writer = await asyncio.wait_for(asyncio.open_connection(host, port), timeout)
        except asyncio.TimeoutError:
            raise ProtocolTimeout(f"connect to {endpoint} timed out after {timeout}s") from None
        logger.debug(f"RSP session connected to {endpoint}")
        return cls(reader, writer, layout, timeout, transcript)

    async def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self.writer.close()
        try:
            await self.writer.wait_closed()
        except (ConnectionError, OSError):
            pass

    async def __aenter__(self) -> "RspSession":
        return self

    async def __aexit__(self, *exc) -> None:
        await self.close()

    @property
    def busy(self) -> bool:
        return self._busy

    # ---- transport -----------------------------------------------------

    def _write(self, data: bytes) -> None:
        if self.transcript:
            self.transcript.record("send", data)
        self.writer.write(data)

    async def _fill(self, deadline: float) -> None:
        remaining = deadline - asyncio.get_running_loop().time()
        if remaining <= 0:
            raise ProtocolTimeout(f"no reply within {self.timeout}s")
        try:
            chunk = await asyncio.wait_for(self.reader.read(4096), remaining)
        except asyncio.TimeoutError:
            raise ProtocolTimeout(f"no reply within {self.timeout}s") from None
        except (ConnectionError, OSError) as exc:
            raise ProtocolTimeout(f"connection lost: {exc}") from exc
        if not chunk:
            raise ProtocolTimeout("connection closed by target")
        if self.transcript:
            self.transcript.record("recv", chunk)
        self._buffer.extend(chunk)

    async def _read_item(self, deadline: float):
        while True:
            try:
                item, consumed = parse(bytes(self._buffer))
            except BadChecksum:
                start = self._buffer.find(b"$")
                del self._buffer[: frame_end(bytes(self._buffer), start)]
                raise
            if not isinstance(item, Incomplete):
                del self._buffer[:consumed]
                return item
            del self._buffer[:consumed]
            await self._fill(deadline)

    async def _exchange(self, payload: bytes, expect_reply: bool = True) -> bytes:
        deadline = asyncio.get_running_loop().time() + self.timeout
        packet = frame(payload)
        logger.debug(f"RSP -> {packet!r}")
        attempts = 0
        while True:
            self._write(packet)
            await self.writer.drain()
            try:
                item = await self._read_item(deadline)
            except BadChecksum:
                raise UnexpectedReply(payload.decode("latin-1"), b"<bad frame before ack>")
            if isinstance(item, Ack):
                break
            if isinstance(item, Nak):
                attempts += 1
                self.retransmits += 1
                logger.warning(f"RSP target sent Nak for {payload!r}, retransmitting")
                if attempts > self.max_retransmits:
                    raise RspError(f"{payload!r} rejected {attempts} times")
                continue
            raise UnexpectedReply(payload.decode("latin-1"), item.payload)

        if not expect_reply:
            return b""
        while True:
            try:
                item = await self._read_item(deadline)
            except BadChecksum as exc:
                logger.warning(f"RSP reply failed checksum ({exc}), requesting retransmit")
                self._write(NAK)
                await self.writer.drain()
                continue
            if isinstance(item, Packet):
                self._write(ACK)
                await self.writer.drain()
                logger.debug(f"RSP <- {item.payload!r}")
                return item.payload

    async def command(self, payload: str | bytes, expect_reply: bool = True) -> bytes:
        """
        Send one command and wait for its reply payload.

        Raises:
            SessionBusy: another command is outstanding (nothing is sent)
            ProtocolTimeout: no complete reply in time or the connection dropped
        """
        if self._busy:
            raise SessionBusy(f"command {payload!r} issued while another is outstanding")
        if self._closed:
            raise ProtocolTimeout("session is closed")
        if isinstance(payload, str):
            payload = payload.encode("latin-1")
        self._busy = True
        try:
            self.commands_sent += 1
            return await self._exchange(payload, expect_reply)
        finally:
            self._busy = False

    async def _command_ok(self, payload: str | bytes) -> None:
        reply = await self.command(payload)
        self._check_error(payload, reply)
        if reply != b"OK":
            raise UnexpectedReply(str(payload)[:32], reply)

    @staticmethod
    def _check_error(request: str | bytes, reply: bytes) -> None:
        code = parse_error_code(reply)
        if code is not None:
            if isinstance(request, bytes):
                request = request.decode("latin-1")
            raise TargetError(code, request[:32])

    # ---- protocol operations ------------------------------------------

    async def read_registers(self, base: Optional[ArchState] = None) -> ArchState:
        """
        'g': registers and flags; cycle_count is taken from ``base`` when given.

        Raises:
            TargetError: ``Exx`` reply
        """
        reply = await self.command("g")
        self._check_error("g", reply)
        return self.layout.decode_registers(reply.decode("latin-1"), base)

    async def write_registers(self, state: ArchState) -> None:
        await self._command_ok("G" + self.layout.encode_registers(state))

    async def read_register(self, index: int) -> int:
        reply = await self.command(f"p{index:x}")
        self._check_error("p", reply)
        if not reply:
            raise UnexpectedReply(f"p{index:x}", reply)
        return parse_hex_le(reply.decode("latin-1"))

    async def write_register(self, index: int, value: int) -> None:
        """'P': the register-level injection primitive."""
        await self._command_ok(f"P{index:x}={hex_le32(value)}")

    async def read_memory(self, addr: int, length: int) -> bytes:
        request = f"m{addr:x},{length:x}"
        reply = await self.command(request)
        self._check_error(request, reply)
        try:
            data = bytes.fromhex(reply.decode("latin-1"))
        except ValueError:
            raise UnexpectedReply(request, reply) from None
        if len(data) != length:
            raise UnexpectedReply(request, reply)
        return data

    async def write_memory(self, addr: int, data: bytes) -> None:
        await self._command_ok(f"M{addr:x},{len(data):x}:{data.hex()}")

    async def _stop_command(self, payload: str) -> StopReply:
        reply = await self.command(payload)
        self._check_error(payload, reply)
        return StopReply.parse(reply, self.layout.index_of_gpr(15))

    async def single_step(self) -> StopReply:
        return await self._stop_command("s")

    async def continue_(self) -> StopReply:
        return await self._stop_command("c")

    async def halt_reason(self) -> StopReply:
        return await self._stop_command("?")

    async def set_breakpoint(self, addr: int, kind: int = 4) -> None:
        await self._command_ok(f"Z0,{addr:x},{kind:x}")

    async def remove_breakpoint(self, addr: int, kind: int = 4) -> None:
        await self._command_ok(f"z0,{addr:x},{kind:x}")

    async def query_supported(self) -> dict[str, str | bool]:
        reply = await self.command("qSupported:swbreak+")
        features: dict[str, str | bool] = {}
        for item in reply.decode("latin-1").split(";"):
            if not item:
                continue
            if "=" in item:
                key, value = item.split("=", 1)
                features[key] = value
            elif item[-1] in "+-?":
                features[item[:-1]] = item[-1] == "+"
            else:
                features[item] = True
        return features

    async def detach(self) -> None:
        await self._command_ok("D")

    async def kill(self) -> None:
        # 'k' 没有回复
        await self.command("k", expect_reply=False)
