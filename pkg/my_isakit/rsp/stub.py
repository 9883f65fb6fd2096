# coding=utf-8
#
# stub.py
# RSP stub 服务端：把任意可单步的 Machine 暴露给外部调试器
#
# 所有状态修改都经过 Machine 的 step / poke_* 公共接口。
# 一次只服务一个客户端连接；并发活动请使用不同端口上的多个实例。
#

import asyncio
import logging
from typing import Iterable, Optional

from ..isa.errors import IsaError, OutOfRangeAccess, UnalignedAccess, UndefinedInstruction
from ..isa.machine import Machine
from ..isa.types import PC, Flags
from .codec import (
    ACK,
    NAK,
    Ack,
    Incomplete,
    Nak,
    Packet,
    error_reply,
    frame,
    frame_end,
    parse,
    parse_hex_le,
)
from .errors import BadChecksum, MalformedFrame
from .layout import RegisterLayout
from .session import SIGTRAP, parse_endpoint
from .transcript import Transcript

logger = logging.getLogger(__name__)

SIGILL = 4
SIGBUS = 7
SIGSEGV = 11

# 错误回复码
E_READ_ONLY = 0x01
E_BAD_ARGUMENT = 0x02
E_UNKNOWN_REGISTER = 0x03
E_OUT_OF_RANGE = 0x14

FAULT_SIGNALS: dict[type[IsaError], int] = {
    UndefinedInstruction: SIGILL,
    UnalignedAccess: SIGBUS,
    OutOfRangeAccess: SIGSEGV,
}

SIGNAL_FAULT_KINDS: dict[int, str] = {
    SIGILL: UndefinedInstruction.kind,
    SIGBUS: UnalignedAccess.kind,
    SIGSEGV: OutOfRangeAccess.kind,
}

DEFAULT_CONTINUE_LIMIT = 1_000_000


def fault_signal(exc: IsaError) -> int:
    for cls, signal in FAULT_SIGNALS.items():
        if isinstance(exc, cls):
            return signal
    return SIGILL


class RspStub:
    """
    Args:
        machine: the model to expose
        layout: register numbering served in 'g'/'p'
        read_only: (start, end) address ranges that reject 'M'
        transcript: optional raw frame recorder
    """

    def __init__(
        self,
        machine: Machine,
        layout: Optional[RegisterLayout] = None,
        read_only: Iterable[tuple[int, int]] = (),
        transcript: Optional[Transcript] = None,
        continue_limit: int = DEFAULT_CONTINUE_LIMIT,
    ):
        self.machine = machine
        self.layout = layout or RegisterLayout.default_arm()
        self.read_only = list(read_only)
        self.transcript = transcript
        self.continue_limit = continue_limit
        self.breakpoints: set[int] = set()
        self.last_signal = SIGTRAP
        self.packets_handled = 0
        self._server: Optional[asyncio.AbstractServer] = None
        self._client_lock = asyncio.Lock()
        self._first_client_done = asyncio.Event()

    # ---- packet dispatch ------------------------------------------------

    def handle_packet(self, payload: bytes) -> Optional[bytes]:
        """
        Answer one packet. Returns the reply payload; None means no reply is sent
        and the connection closes (the k packet).
        """
        self.packets_handled += 1
        text = payload.decode("latin-1")
        if not text:
            return b""
        command, args = text[0], text[1:]
        try:
            match command:
                case "g":
                    return self._read_registers()
                case "G":
                    return self._write_registers(args)
                case "p":
                    return self._read_register(args)
                case "P":
                    return self._write_register(args)
                case "m":
                    return self._read_memory(args)
                case "M":
                    return self._write_memory(args)
                case "s":
                    return self._step()
                case "c":
                    return self._continue()
                case "Z" | "z":
                    return self._breakpoint(command == "Z", args)
                case "?":
                    return f"S{self.last_signal:02x}".encode("ascii")
                case "q" if text.startswith("qSupported"):
                    return b"PacketSize=4000;swbreak+"
                case "D":
                    return b"OK"
                case "k":
                    return None
        except ValueError:
            return error_reply(E_BAD_ARGUMENT)
        return b""

    def _read_registers(self) -> bytes:
        return self.layout.encode_registers(self.machine.read_state()).encode("ascii")

    def _write_registers(self, args: str) -> bytes:
        if len(args) < self.layout.payload_width:
            return error_reply(E_BAD_ARGUMENT)
        current = self.machine.read_state()
        state = self.layout.decode_registers(args, current)
        for index, value in enumerate(state.regs):
            self.machine.poke_register(index, value)
        self.machine.poke_flags(state.flags)
        return b"OK"

    def _read_register(self, args: str) -> bytes:
        descriptor = self.layout.by_index(int(args, 16))
        if descriptor is None:
            return error_reply(E_UNKNOWN_REGISTER)
        return self.layout.encode_value(descriptor, self.machine.read_state()).encode("ascii")

    def _write_register(self, args: str) -> bytes:
        number, _, value_text = args.partition("=")
        descriptor = self.layout.by_index(int(number, 16))
        if descriptor is None:
            return error_reply(E_UNKNOWN_REGISTER)
        value = parse_hex_le(value_text)
        if descriptor.kind == "gpr":
            self.machine.poke_register(descriptor.gpr, value)
        elif descriptor.kind == "cpsr":
            current = self.machine.read_state()
            encoded = current.flags.to_cpsr() & 0x0FFFFFFF | (value & 0xF0000000)
            self.machine.poke_flags(Flags.from_cpsr(encoded))
        return b"OK"

    def _read_memory(self, args: str) -> bytes:
        addr_text, _, length_text = args.partition(",")
        addr, length = int(addr_text, 16), int(length_text, 16)
        try:
            return self.machine.read_memory(addr, length).hex().encode("ascii")
        except OutOfRangeAccess:
            return error_reply(E_OUT_OF_RANGE)

    def _write_memory(self, args: str) -> bytes:
        location, _, data_text = args.partition(":")
        addr_text, _, length_text = location.partition(",")
        addr, length = int(addr_text, 16), int(length_text, 16)
        data = bytes.fromhex(data_text)
        if len(data) != length:
            return error_reply(E_BAD_ARGUMENT)
        if any(addr < end and start < addr + length for start, end in self.read_only):
            return error_reply(E_READ_ONLY)
        try:
            self.machine.poke_memory(addr, data)
        except OutOfRangeAccess:
            return error_reply(E_OUT_OF_RANGE)
        return b"OK"

    def _step_once(self) -> int:
        try:
            self.machine.step()
        except IsaError as exc:
            logger.debug(f"Stub target fault: {exc}")
            return fault_signal(exc)
        return SIGTRAP

    def _step(self) -> bytes:
        self.last_signal = self._step_once()
        return f"S{self.last_signal:02x}".encode("ascii")

    def _continue(self) -> bytes:
        signal = SIGTRAP
        for _ in range(self.continue_limit):
            signal = self._step_once()
            if signal != SIGTRAP or self.machine.read_state().regs[PC] in self.breakpoints:
                break
        self.last_signal = signal
        return f"S{signal:02x}".encode("ascii")

    def _breakpoint(self, insert: bool, args: str) -> bytes:
        kind, _, rest = args.partition(",")
        if kind != "0":
            return b""
        addr = int(rest.partition(",")[0], 16)
        if insert:
            self.breakpoints.add(addr)
        else:
            self.breakpoints.discard(addr)
        return b"OK"

    # ---- connection handling -------------------------------------------

    def _write(self, writer: asyncio.StreamWriter, data: bytes) -> None:
        if self.transcript:
            self.transcript.record("send", data)
        writer.write(data)

    async def handle_client(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        if self._client_lock.locked():
            logger.warning("Stub already has a client, refusing connection")
            writer.close()
            return
        async with self._client_lock:
            peer = writer.get_extra_info("peername")
            logger.info(f"Debugger attached from {peer}")
            try:
                await self._serve_connection(reader, writer)
            except (ConnectionError, OSError) as exc:
                logger.info(f"Debugger connection lost: {exc}")
            finally:
                writer.close()
                logger.info(f"Debugger detached from {peer}")
                self._first_client_done.set()

    async def _serve_connection(self, reader, writer) -> None:
        buffer = bytearray()
        last_reply: Optional[bytes] = None
        while True:
            chunk = await reader.read(4096)
            if not chunk:
                return
            if self.transcript:
                self.transcript.record("recv", chunk)
            buffer.extend(chunk)
            while buffer:
                try:
                    item, consumed = parse(bytes(buffer))
                except (BadChecksum, MalformedFrame) as exc:
                    logger.warning(f"Stub rejected frame: {exc}")
                    start = buffer.find(b"$")
                    end = frame_end(bytes(buffer), start)
                    del buffer[: end if end > 0 else len(buffer)]
                    self._write(writer, NAK)
                    continue
                del buffer[:consumed]
                if isinstance(item, Incomplete):
                    break
                if isinstance(item, Ack):
                    continue
                if isinstance(item, Nak):
                    if last_reply is not None:
                        self._write(writer, last_reply)
                    continue
                assert isinstance(item, Packet)
                self._write(writer, ACK)
                reply = self.handle_packet(item.payload)
                if reply is None:
                    await writer.drain()
                    return
                last_reply = frame(reply)
                self._write(writer, last_reply)
                if item.payload[:1] == b"D":
                    await writer.drain()
                    return
            await writer.drain()

    # ---- server lifecycle ----------------------------------------------

    async def start(self, host: str = "127.0.0.1", port: int = 0) -> int:
        """Start listening; returns the bound port."""
        self._server = await asyncio.start_server(self.handle_client, host, port)
        bound = self._server.sockets[0].getsockname()[1]
        logger.info(f"RSP stub listening on {host}:{bound}")
        return bound

    async def wait_first_client(self) -> None:
        await self._first_client_done.wait()

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def __aenter__(self) -> "RspStub":
        return self

    async def __aexit__(self, *exc) -> None:
        await self.stop()


async def serve_stub(
    machine: Machine,
    endpoint: str,
    persist: bool = False,
    layout: Optional[RegisterLayout] = None,
    read_only: Iterable[tuple[int, int]] = (),
    transcript: Optional[Transcript] = None,
) -> None:
    """
    Serve ``machine`` on ``endpoint`` until the first client disconnects, or
    forever when ``persist`` is set.
    """
    host, port = parse_endpoint(endpoint)
    stub = RspStub(machine, layout, read_only, transcript)
    await stub.start(host, port)
    try:
        if persist:
            assert stub._server is not None
            await stub._server.serve_forever()
        else:
            await stub.wait_first_client()
    finally:
        await stub.stop()
