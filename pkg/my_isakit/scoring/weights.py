# coding=utf-8
#
# weights.py
# 保真度各维度的权重
#

import json
import math
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .errors import InvalidWeights

WEIGHTS_SCHEMA_VERSION = 1

DIMENSIONS = (
    "register_trace_delta",
    "memory_trace_delta",
    "timing_deviation",
    "state_transition_mismatch",
    "fault_response_divergence",
    "resource_profile_delta",
)


class Weights(BaseModel):
    """Nonnegative weights summing to 1; equal by default."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: int = WEIGHTS_SCHEMA_VERSION
    register_trace_delta: float = 1 / 6
    memory_trace_delta: float = 1 / 6
    timing_deviation: float = 1 / 6
    state_transition_mismatch: float = 1 / 6
    fault_response_divergence: float = 1 / 6
    resource_profile_delta: float = 1 / 6

    @model_validator(mode="after")
    def _check(self) -> "Weights":
        values = [getattr(self, name) for name in DIMENSIONS]
        if any(v < 0 or not math.isfinite(v) for v in values):
            raise ValueError("weights must be finite and nonnegative")
        if not math.isclose(sum(values), 1.0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {sum(values)}")
        return self

    @classmethod
    def create(cls, **values: float) -> "Weights":
        """
        Raises:
            InvalidWeights: negative weights or a sum other than 1
        """
        try:
            return cls(**values)
        except ValidationError as exc:
            raise InvalidWeights(str(exc)) from exc

    @classmethod
    def from_vector(cls, vector: list[float] | tuple[float, ...]) -> "Weights":
        if len(vector) != len(DIMENSIONS):
            raise InvalidWeights(f"expected {len(DIMENSIONS)} weights, got {len(vector)}")
        return cls.create(**dict(zip(DIMENSIONS, vector)))

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in DIMENSIONS}

    def effective(self, has_fault_metrics: bool) -> dict[str, float]:
        """Without fault metrics the fault weight is spread over the others proportionally."""
        weights = self.as_dict()
        if has_fault_metrics:
            return weights
        dropped = weights.pop("fault_response_divergence")
        rest = sum(weights.values())
        if rest > 0:
            weights = {name: w + dropped * w / rest for name, w in weights.items()}
        weights["fault_response_divergence"] = 0.0
        return weights


def weights_from_document(doc: Any) -> Weights:
    if isinstance(doc, list):
        return Weights.from_vector(doc)
    if not isinstance(doc, dict):
        raise InvalidWeights("weights must be a JSON object or a list of six numbers")
    return Weights.create(**doc)


def load_weights(path: str | Path) -> Weights:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidWeights(f"{path}: not valid JSON: {exc}") from exc
    return weights_from_document(doc)
