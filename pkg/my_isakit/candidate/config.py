# coding=utf-8
#
# config.py
# CandidateConfig：启用的 knob 集合 + 版本号，以及配置文件的读写
#
# 文件格式（JSON）：
#   {"schema_version": 1, "version": 3, "knobs": {"cmp_skips_n_update": true, ...}}
#

import json
import logging
from pathlib import Path
from typing import Annotated, Any, Iterable, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictBool,
    StrictInt,
    StrictStr,
    ValidationError,
    field_serializer,
)

from .errors import InvalidCandidateConfig
from .knobs import CATALOG, Knob, catalog_order, knob_from_name

logger = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1


class CandidateDocument(BaseModel):
    """On-disk shape; knob names are resolved against the catalog afterwards."""

    # artifacts also carry schema_version and harness_config
    model_config = ConfigDict(extra="allow")

    version: Annotated[StrictInt, Field(ge=0)] = 0
    knobs: Optional[dict[str, StrictBool]] = None
    active_knobs: list[StrictStr] = []


class CandidateConfig(BaseModel):
    """Set of active knobs; the empty set is the golden behavior."""

    model_config = ConfigDict(frozen=True)

    active_knobs: frozenset[Knob] = frozenset()
    version: int = 0

    @field_serializer("active_knobs")
    def _serialize_knobs(self, knobs: frozenset[Knob]) -> list[str]:
        return [k.value for k in catalog_order(knobs)]

    @classmethod
    def from_names(cls, names: Iterable[str | Knob], version: int = 0) -> "CandidateConfig":
        """
        Raises:
            UnknownKnob: a name is not in the catalog
        """
        return cls(active_knobs=frozenset(knob_from_name(n) for n in names), version=version)

    @property
    def ordered_knobs(self) -> list[Knob]:
        return catalog_order(self.active_knobs)

    @property
    def is_golden(self) -> bool:
        return not self.active_knobs

    def with_knob(self, knob: Knob, active: bool) -> "CandidateConfig":
        knobs = set(self.active_knobs)
        if active:
            knobs.add(knob)
        else:
            knobs.discard(knob)
        return CandidateConfig(active_knobs=frozenset(knobs), version=self.version)

    def flip(self, knob: Knob) -> "CandidateConfig":
        return self.with_knob(knob, knob not in self.active_knobs)

    def with_version(self, version: int) -> "CandidateConfig":
        return CandidateConfig(active_knobs=self.active_knobs, version=version)

    def same_knobs(self, other: "CandidateConfig") -> bool:
        return self.active_knobs == other.active_knobs

    def label(self) -> str:
        if not self.active_knobs:
            return "{}"
        return "{" + ", ".join(k.value for k in self.ordered_knobs) + "}"

    # ---- document form --------------------------------------------------

    def to_document(self) -> dict[str, Any]:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "version": self.version,
            "knobs": {k.value: k in self.active_knobs for k in CATALOG},
        }

    @classmethod
    def from_document(cls, doc: Any) -> "CandidateConfig":
        """
        Accepts the ``knobs`` mapping form, or a bare ``active_knobs`` list.

        Raises:
            UnknownKnob: a knob name is not in the catalog
            InvalidCandidateConfig: the document shape is wrong
        """
        try:
            parsed = CandidateDocument.model_validate(doc)
        except ValidationError as exc:
            raise InvalidCandidateConfig(f"invalid candidate config: {exc}") from exc
        if "knobs" in parsed.model_fields_set:
            if parsed.knobs is None:
                raise InvalidCandidateConfig("'knobs' must map knob names to booleans")
            knobs = [knob_from_name(name) for name in parsed.knobs]
            names = [knob for knob, value in zip(knobs, parsed.knobs.values()) if value]
            return cls.from_names(names, parsed.version)
        return cls.from_names(parsed.active_knobs, parsed.version)

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CandidateConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidCandidateConfig(f"candidate config is not valid JSON: {exc}") from exc
        return cls.from_document(doc)


def load_candidate_config(path: str | Path) -> CandidateConfig:
    path = Path(path)
    config = CandidateConfig.from_json(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded candidate config {config.label()} v{config.version} from {path}")
    return config


def save_candidate_config(config: CandidateConfig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.to_json() + "\n", encoding="utf-8")
    return path
