from decimal import Decimal
from enum import Enum
from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProofStatus(str, Enum):
    Proven = "proven"
    Failing = "failing"
    Unknown = "unknown"


class FpvReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    per_assertion: Dict[str, ProofStatus] = {}
    cex_summaries: Dict[str, str] = {}
    compiled: bool = False
    engine: str = ""
    runtime: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def consistent(self):
        if not self.compiled and self.per_assertion:
            raise ValueError("a report that did not compile has no assertion statuses")
        failing = {n for n, s in self.per_assertion.items() if s == ProofStatus.Failing}
        if not set(self.cex_summaries) <= failing:
            raise ValueError("counterexamples are only recorded for failing assertions")
        return self

    def count(self, status: ProofStatus) -> int:
        return sum(1 for s in self.per_assertion.values() if s == status)

    @property
    def n_proven(self) -> int:
        return self.count(ProofStatus.Proven)

    @property
    def n_failing(self) -> int:
        return self.count(ProofStatus.Failing)

    @property
    def n_unknown(self) -> int:
        return self.count(ProofStatus.Unknown)

    @property
    def full_proof(self) -> bool:
        return self.compiled and bool(self.per_assertion) and self.n_proven == len(self.per_assertion)


class CoverageReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    statement: float = Field(ge=0, le=1)
    toggle: float = Field(ge=0, le=1)
    source: str = ""

    @property
    def complete(self) -> bool:
        return self.statement == 1 and self.toggle == 1


class CoverageDelta(BaseModel):
    model_config = ConfigDict(frozen=True)

    statement_ratio: Decimal = Field(ge=0)
    toggle_ratio: Decimal = Field(ge=0)
