# coding=utf-8
#
# rsp_tests.py
# RSP 帧编解码、客户端会话与 stub 服务端
#

import asyncio
import json
import logging
import random

import pytest

from my_isakit.candidate import negative_compare_program
from my_isakit.isa import GoldenMachine, from_words
from my_isakit.rsp import (
    Ack,
    BadChecksum,
    Incomplete,
    MalformedFrame,
    Nak,
    Packet,
    ProtocolTimeout,
    RegisterLayout,
    RspSession,
    RspStub,
    SessionBusy,
    TargetError,
    Transcript,
    checksum,
    escape,
    frame,
    load_layout,
    parse,
    parse_endpoint,
    parse_one,
    unescape,
)
from .conftest import loopback_stub

logger = logging.getLogger(__name__)


# codec
def test_frame_known_vectors():
    assert frame("g") == b"$g#67"
    assert frame("m4100,4") == b"$m4100,4#92"
    assert frame(b"") == b"$#00"
    assert checksum(b"OK") == 0x9A


def test_escape_special_bytes():
    assert escape(b"a#b$c}d*") == b"a}\x03b}\x04c}]d}\n"
    assert unescape(escape(b"#$}*")) == b"#$}*"
    assert frame(b"}") == b"$}]#" + f"{checksum(b'}]'):02x}".encode()


def test_run_length_expansion():
    assert unescape(b"0* ") == b"0000"
    body = b"0* "
    packet = parse_one(b"$" + body + b"#" + f"{checksum(body):02x}".encode())
    assert packet == Packet(b"0000")
    with pytest.raises(MalformedFrame):
        unescape(b"*!")
    with pytest.raises(MalformedFrame):
        unescape(b"abc}")


def test_round_trip_random_payloads():
    rng = random.Random(1234)
    alphabet = b"#$}*+-" + bytes(range(32, 127))
    for _ in range(1000):
        payload = bytes(rng.choice(alphabet) for _ in range(rng.randrange(0, 120)))
        assert parse_one(frame(payload)) == Packet(payload)


def test_parse_acks_noise_and_partial_frames():
    assert parse(b"+$g#67") == (Ack(), 1)
    assert parse(b"\x00\x03-") == (Nak(), 3)
    item, consumed = parse(b"noise$g#6")
    assert isinstance(item, Incomplete) and consumed == 5
    assert parse(b"$g#67$m0,4#fb") == (Packet(b"g"), 5)
    with pytest.raises(BadChecksum):
        parse(b"$g#00")
    with pytest.raises(MalformedFrame):
        parse(b"$g#zz")
    with pytest.raises(MalformedFrame):
        parse_one(frame("g") + b"+")


def test_parse_endpoint():
    assert parse_endpoint("127.0.0.1:1234") == ("127.0.0.1", 1234)
    assert parse_endpoint("[::1]:65535") == ("::1", 65535)
    for bad in ("1234", "host:", "host:port", "localhost:0"):
        with pytest.raises(ValueError):
            parse_endpoint(bad)


# register layout
def test_default_layout_width():
    layout = RegisterLayout.default_arm()
    assert layout.register_count == 17
    assert layout.payload_width == 136
    assert layout.index_of_cpsr() == 25
    assert layout.index_of_gpr(15) == 15


def test_load_layout(tmp_path):
    doc = RegisterLayout.default_arm().model_dump(mode="json")
    path = tmp_path / "layout.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert load_layout(path) == RegisterLayout.default_arm()

    doc["descriptors"] = doc["descriptors"][:-1]
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(ValueError):
        load_layout(path)


# stub packet handling
def _stub_on(program) -> RspStub:
    machine = GoldenMachine()
    machine.load(program)
    return RspStub(machine, read_only=[(0x0, 0x10)])


def test_stub_answers_core_packets():
    stub = _stub_on(negative_compare_program())
    reply = stub.handle_packet(b"g")
    assert len(reply) == 136
    assert stub.handle_packet(b"m0,4") == b"0a00a0e3"
    assert stub.handle_packet(b"m1000,4") == b"E14"
    assert stub.handle_packet(b"M0,4:00000000") == b"E01"
    assert stub.handle_packet(b"vMustReplyEmpty") == b""
    assert stub.handle_packet(b"") == b""
    assert stub.handle_packet(b"mzz,4") == b"E02"
    assert stub.handle_packet(b"qSupported:swbreak+") == b"PacketSize=4000;swbreak+"
    assert stub.handle_packet(b"k") is None


def test_stub_step_breakpoint_and_fault_signals():
    stub = _stub_on(negative_compare_program())
    assert stub.handle_packet(b"s") == b"S05"
    assert stub.machine.read_state().pc == 4
    assert stub.handle_packet(b"Pf=00000000") == b"OK"
    assert stub.machine.read_state().pc == 0

    assert stub.handle_packet(b"Z0,8,4") == b"OK"
    assert stub.handle_packet(b"c") == b"S05"
    assert stub.machine.read_state().pc == 8
    assert stub.handle_packet(b"z0,8,4") == b"OK"
    # CMP runs, then the fetch past the image faults
    assert stub.handle_packet(b"c") == b"S0b"
    assert stub.handle_packet(b"?") == b"S0b"
    assert stub.machine.read_state().flags.n

    undefined = _stub_on(from_words([0xE0A00001]))
    assert undefined.handle_packet(b"s") == b"S04"


def test_stub_register_writes():
    stub = _stub_on(negative_compare_program())
    assert stub.handle_packet(b"P0=efbeadde") == b"OK"
    assert stub.machine.read_state().regs[0] == 0xDEADBEEF
    assert stub.handle_packet(b"P19=00000080") == b"OK"
    assert stub.machine.read_state().flags.n
    assert stub.handle_packet(b"p19") == b"10000080"
    assert stub.handle_packet(b"p40").startswith(b"E")


# session against a loopback stub
@pytest.mark.asyncio
async def test_session_over_loopback():
    transcript = Transcript()
    async with loopback_stub(program=negative_compare_program(), read_only=[(0, 4)]) as (_, endpoint):
        async with await RspSession.connect(endpoint, timeout=2.0, transcript=transcript) as session:
            features = await session.query_supported()
            assert features == {"PacketSize": "4000", "swbreak": True}

            state = await session.read_registers()
            assert state.pc == 0 and state.regs[0] == 0
            assert await session.read_memory(4, 4) == (0xE3A01014).to_bytes(4, "little")

            with pytest.raises(TargetError) as info:
                await session.write_memory(0, b"\x00\x00\x00\x00")
            assert info.value.code == 0x01
            with pytest.raises(TargetError) as info:
                await session.read_memory(0x4000, 4)
            assert info.value.code == 0x14

            stop = await session.single_step()
            assert stop.signal == 5 and not stop.exited
            assert (await session.read_registers()).regs[0] == 10

            await session.write_register(1, 0x1234)
            assert await session.read_register(1) == 0x1234
            await session.detach()

    assert transcript.sent()[0] == frame("qSupported:swbreak+")
    assert b"$OK#9a" in transcript.received()
    assert session.retransmits == 0


async def _scripted_target(script):
    """A fake target answering each parsed item with ``script(item)``."""

    async def handle(reader, writer):
        buffer = b""
        try:
            while True:
                chunk = await reader.read(4096)
                if not chunk:
                    break
                buffer += chunk
                while buffer:
                    item, consumed = parse(buffer)
                    buffer = buffer[consumed:]
                    if isinstance(item, Incomplete):
                        break
                    answer = script(item)
                    if answer:
                        writer.write(answer)
                        await writer.drain()
        finally:
            writer.close()

    server = await asyncio.start_server(handle, "127.0.0.1", 0)
    return server, f"127.0.0.1:{server.sockets[0].getsockname()[1]}"


@pytest.mark.asyncio
async def test_session_retransmits_after_nak():
    packets = []

    def script(item):
        if isinstance(item, Packet):
            packets.append(item.payload)
            return b"-" if len(packets) == 1 else b"+" + frame("OK")
        return b""

    server, endpoint = await _scripted_target(script)
    try:
        async with await RspSession.connect(endpoint, timeout=2.0) as session:
            assert await session.command("QStartNoAckMode") == b"OK"
            assert session.retransmits == 1
            assert session.commands_sent == 1
    finally:
        server.close()
        await server.wait_closed()
    assert packets == [b"QStartNoAckMode", b"QStartNoAckMode"]


@pytest.mark.asyncio
async def test_session_naks_corrupt_reply():
    naks = []

    def script(item):
        if isinstance(item, Packet):
            return b"+$OK#00"
        if isinstance(item, Nak):
            naks.append(item)
            return frame("OK")
        return b""

    server, endpoint = await _scripted_target(script)
    try:
        async with await RspSession.connect(endpoint, timeout=2.0) as session:
            assert await session.command("g") == b"OK"
    finally:
        server.close()
        await server.wait_closed()
    assert len(naks) == 1


@pytest.mark.asyncio
async def test_session_times_out_on_silent_target():
    server, endpoint = await _scripted_target(lambda item: b"")
    try:
        async with await RspSession.connect(endpoint, timeout=0.2) as session:
            with pytest.raises(ProtocolTimeout):
                await session.command("g")
    finally:
        server.close()
        await server.wait_closed()


@pytest.mark.asyncio
async def test_session_rejects_concurrent_commands():
    async with loopback_stub(program=negative_compare_program()) as (_, endpoint):
        async with await RspSession.connect(endpoint, timeout=2.0) as session:
            first, second = await asyncio.gather(
                session.command("g"), session.command("g"), return_exceptions=True
            )
            assert len(first) == 136
            assert isinstance(second, SessionBusy)
            assert not session.busy


@pytest.mark.asyncio
async def test_stub_naks_corrupt_frame():
    async with loopback_stub(program=negative_compare_program()) as (_, endpoint):
        host, port = parse_endpoint(endpoint)
        reader, writer = await asyncio.open_connection(host, port)
        try:
            writer.write(b"$g#00")
            await writer.drain()
            assert await asyncio.wait_for(reader.readexactly(1), 2.0) == b"-"

            writer.write(frame("m0,4"))
            await writer.drain()
            expected = b"+" + frame("0a00a0e3")
            assert await asyncio.wait_for(reader.readexactly(len(expected)), 2.0) == expected
        finally:
            writer.close()
