# coding=utf-8
#
# errors.py
# GDB Remote Serial Protocol errors
#

from typing import Optional


class RspError(Exception):
    """Base class for protocol and transport failures."""


class BadChecksum(RspError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"bad checksum: expected {expected:02x}, got {got:02x}")
        self.expected = expected
        self.got = got


class MalformedFrame(RspError):
    pass


class TargetError(RspError):
    """The target answered ``Exx``."""

    def __init__(self, code: int, request: Optional[str] = None):
        message = f"target error E{code:02x}"
        if request:
            message += f" in reply to {request!r}"
        super().__init__(message)
        self.code = code
        self.request = request


class ProtocolTimeout(RspError):
    """No complete reply within the deadline, or the connection went away."""


class UnexpectedReply(RspError):
    def __init__(self, request: str, reply: bytes):
        super().__init__(f"unexpected reply to {request!r}: {reply[:64]!r}")
        self.request = request
        self.reply = reply


class SessionBusy(RspError):
    """A command was issued while another one is still outstanding."""
