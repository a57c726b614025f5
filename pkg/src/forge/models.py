from enum import Enum
from typing import FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..sva import AssertionBatch


class Attribute(str, Enum):
    StableData = "stable_data"
    EventualResponse = "eventual_response"


class HandshakeGroup(BaseModel):
    model_config = ConfigDict(frozen=True)

    valid: str
    ready: Optional[str] = None
    data: List[str] = []

    @property
    def ports(self) -> List[str]:
        return [self.valid] + ([self.ready] if self.ready else []) + self.data


class TransactionAnnotation(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    request: HandshakeGroup
    response: HandshakeGroup
    attributes: FrozenSet[Attribute] = frozenset()

    def to_line(self) -> str:
        parts = [f"transaction {self.name}:"]
        for prefix, group in (("req", self.request), ("resp", self.response)):
            parts.append(f"{prefix}.valid={group.valid}")
            if group.ready:
                parts.append(f"{prefix}.ready={group.ready}")
            if group.data:
                parts.append(f"{prefix}.data={','.join(group.data)}")
        if self.attributes:
            parts.append("attrs=" + ",".join(sorted(a.value for a in self.attributes)))
        return " ".join(parts)


class AnnotationSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    annotations: List[TransactionAnnotation] = []
    unknown_lines: List[Tuple[int, str]] = []

    def to_text(self) -> str:
        return "".join(a.to_line() + "\n" for a in self.annotations)


class EngineMode(str, Enum):
    Prove = "prove"
    Bmc = "bmc"
    Cover = "cover"


class EngineOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: EngineMode = EngineMode.Prove
    depth: int = Field(default=20, gt=0)
    timeout: Optional[int] = Field(default=None, gt=0)


class FtOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    force: bool = False
    clock: Optional[str] = None
    reset: Optional[str] = None
    reset_active_low: Optional[bool] = None
    liveness_depth: int = Field(default=16, gt=0)
    engine: EngineOptions = EngineOptions()


class FtArtifact(BaseModel):
    model_config = ConfigDict(frozen=True)

    design: str
    property_module_text: str
    bind_text: str
    engine_config_text: str
    files: List[Tuple[str, str]]
    batch: AssertionBatch = AssertionBatch()

    @field_validator("property_module_text", "bind_text", "engine_config_text")
    @classmethod
    def not_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("FT texts must be non-empty")
        return v

    @property
    def top(self) -> str:
        return self.design

    @property
    def assertion_names(self) -> List[str]:
        return self.batch.names

    def file(self, relative_path: str) -> Optional[str]:
        return next((content for path, content in self.files if path == relative_path), None)
