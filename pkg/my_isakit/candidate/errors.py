# coding=utf-8
#
# errors.py
# Candidate configuration errors
#


class UnknownKnob(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown knob: {name!r}")
        self.name = name


class InvalidCandidateConfig(ValueError):
    """A candidate config document could not be parsed."""
