# coding=utf-8
#
# codec.py
# RSP 帧编解码
#
# 帧格式：'$' + 转义后的负载 + '#' + 两位小写十六进制校验和
# 校验和针对转义后的帧体计算；'#' '$' '}' '*' 用 '}' + (byte ^ 0x20) 转义。
# 解码时展开游程编码（X '*' n 表示再重复 X n-29 次），发送端从不产生游程编码。
#

import logging
from dataclasses import dataclass
from typing import Union

from .errors import BadChecksum, MalformedFrame

logger = logging.getLogger(__name__)

ACK = b"+"
NAK = b"-"
ESCAPE = 0x7D
_NEEDS_ESCAPE = frozenset(b"#$}*")
_RLE_BIAS = 29


@dataclass(frozen=True)
class Packet:
    payload: bytes

    @property
    def text(self) -> str:
        return self.payload.decode("latin-1")


@dataclass(frozen=True)
class Ack:
    pass


@dataclass(frozen=True)
class Nak:
    pass


@dataclass(frozen=True)
class Incomplete:
    pass


ParseResult = Union[Packet, Ack, Nak, Incomplete]


def checksum(body: bytes) -> int:
    return sum(body) & 0xFF


def escape(payload: bytes) -> bytes:
    out = bytearray()
    for byte in payload:
        if byte in _NEEDS_ESCAPE:
            out.append(ESCAPE)
            out.append(byte ^ 0x20)
        else:
            out.append(byte)
    return bytes(out)


def unescape(body: bytes) -> bytes:
    """
    Undo escaping and expand run-length encoding.

    Raises:
        MalformedFrame: dangling escape, or a repeat marker with nothing to repeat
    """
    out = bytearray()
    i = 0
    while i < len(body):
        byte = body[i]
        if byte == ESCAPE:
            if i + 1 >= len(body):
                raise MalformedFrame("frame ends inside an escape sequence")
            out.append(body[i + 1] ^ 0x20)
            i += 2
        elif byte == 0x2A:  # '*'
            if not out or i + 1 >= len(body):
                raise MalformedFrame("run-length marker without a preceding byte")
            count = body[i + 1] - _RLE_BIAS
            if count < 0:
                raise MalformedFrame(f"invalid run-length count byte {body[i + 1]:#x}")
            out.extend(out[-1:] * count)
            i += 2
        else:
            out.append(byte)
            i += 1
    return bytes(out)


def frame(payload: bytes | str) -> bytes:
    """
    Args:
        payload: raw payload (str is encoded as latin-1)

    Returns:
        ``$<escaped>#<checksum>``
    """
    if isinstance(payload, str):
        payload = payload.encode("latin-1")
    body = escape(payload)
    return b"$" + body + b"#" + f"{checksum(body):02x}".encode("ascii")


def parse(data: bytes) -> tuple[ParseResult, int]:
    """
    Parse the first item in a receive buffer.

    Bytes before a '$' that are neither '+' nor '-' (line noise, Ctrl-C handled
    elsewhere) are skipped.

    Returns:
        (item, consumed); Incomplete consumes nothing but leading noise

    Raises:
        BadChecksum: a complete frame whose checksum does not match
        MalformedFrame: non-hex checksum digits or a bad body
    """
    i = 0
    while i < len(data):
        byte = data[i : i + 1]
        if byte == ACK:
            return Ack(), i + 1
        if byte == NAK:
            return Nak(), i + 1
        if byte == b"$":
            break
        i += 1
    else:
        return Incomplete(), i

    start = i
    end = data.find(b"#", start + 1)
    if end < 0 or end + 3 > len(data):
        return Incomplete(), start
    body = data[start + 1 : end]
    digits = data[end + 1 : end + 3]
    try:
        got = int(digits, 16)
    except ValueError:
        raise MalformedFrame(f"checksum digits are not hex: {digits!r}") from None
    expected = checksum(body)
    if got != expected:
        raise BadChecksum(expected, got)
    return Packet(unescape(body)), end + 3


def parse_one(data: bytes) -> ParseResult:
    """Parse a buffer that holds exactly one item, e.g. ``parse_one(frame(p))``."""
    item, consumed = parse(data)
    if isinstance(item, Incomplete):
        return item
    if consumed != len(data):
        raise MalformedFrame(f"{len(data) - consumed} trailing bytes after frame")
    return item


def frame_end(data: bytes, start: int = 0) -> int:
    """Index one past the frame beginning at ``start``, or -1 when incomplete."""
    end = data.find(b"#", start + 1)
    if end < 0 or end + 3 > len(data):
        return -1
    return end + 3


# ---- payload helpers -------------------------------------------------------


def hex_le32(value: int) -> str:
    return (value & 0xFFFFFFFF).to_bytes(4, "little").hex()


def parse_hex_le(text: str) -> int:
    return int.from_bytes(bytes.fromhex(text), "little")


def error_reply(code: int) -> bytes:
    return f"E{code:02x}".encode("ascii")


def parse_error_code(payload: bytes) -> int | None:
    """Return the code of an ``Exx`` reply, None for anything else."""
    if len(payload) == 3 and payload[:1] == b"E":
        try:
            return int(payload[1:], 16)
        except ValueError:
            return None
    return None
