# coding=utf-8
#
# rsp 包
# GDB Remote Serial Protocol：帧编解码、客户端会话与 stub 服务端
#

from .codec import (
    Ack,
    Incomplete,
    Nak,
    Packet,
    checksum,
    escape,
    frame,
    parse,
    parse_one,
    unescape,
)
from .errors import (
    BadChecksum,
    MalformedFrame,
    ProtocolTimeout,
    RspError,
    SessionBusy,
    TargetError,
    UnexpectedReply,
)
from .layout import RegisterDescriptor, RegisterLayout, load_layout
from .session import DEFAULT_TIMEOUT_SECS, SIGTRAP, RspSession, StopReply, parse_endpoint
from .stub import SIGBUS, SIGILL, SIGNAL_FAULT_KINDS, SIGSEGV, RspStub, fault_signal, serve_stub
from .transcript import Transcript, TranscriptEntry

__all__ = [
    "Ack",
    "Incomplete",
    "Nak",
    "Packet",
    "checksum",
    "escape",
    "frame",
    "parse",
    "parse_one",
    "unescape",
    "BadChecksum",
    "MalformedFrame",
    "ProtocolTimeout",
    "RspError",
    "SessionBusy",
    "TargetError",
    "UnexpectedReply",
    "RegisterDescriptor",
    "RegisterLayout",
    "load_layout",
    "DEFAULT_TIMEOUT_SECS",
    "SIGTRAP",
    "RspSession",
    "StopReply",
    "parse_endpoint",
    "SIGBUS",
    "SIGILL",
    "SIGNAL_FAULT_KINDS",
    "SIGSEGV",
    "RspStub",
    "fault_signal",
    "serve_stub",
    "Transcript",
    "TranscriptEntry",
]
