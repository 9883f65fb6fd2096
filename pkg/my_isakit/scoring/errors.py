# coding=utf-8
#
# errors.py
# Scoring and repair errors
#


class ScoringError(Exception):
    pass


class InvalidWeights(ScoringError, ValueError):
    """Weights are negative or do not sum to 1."""


class SynthesizerFailure(ScoringError):
    """The synthesizer timed out, exited nonzero, or returned an unusable proposal."""
