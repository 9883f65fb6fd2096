# coding=utf-8
#
# errors.py
# Lockstep runner errors
#

from typing import Optional


class LockstepError(Exception):
    """A lockstep run could not continue; ``seq`` is the step being executed."""

    def __init__(self, message: str, seq: Optional[int] = None):
        if seq is not None:
            message = f"step {seq}: {message}"
        super().__init__(message)
        self.seq = seq


class SetupMismatch(LockstepError):
    """Reference and candidate did not start from the same pc and image."""

    def __init__(self, differences: list[str]):
        super().__init__("initial state mismatch: " + "; ".join(differences))
        self.differences = differences
