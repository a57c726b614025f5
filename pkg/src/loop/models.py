from datetime import datetime, timezone
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..bridge import CoverageReport, FpvReport

FPV_PROMPT_KIND = "Fpv"


class Flow(str, Enum):
    Refine = "refine"
    Sva = "sva"
    Design = "design"


class BatchStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_assertions: int = Field(default=0, ge=0)
    n_lint_errors: int = Field(default=0, ge=0)
    n_lint_warnings: int = Field(default=0, ge=0)


class FpvStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    compiled: bool
    n_failing: int = Field(default=0, ge=0)
    n_proven: int = Field(default=0, ge=0)

    @classmethod
    def of(cls, report: FpvReport) -> "FpvStats":
        return cls(compiled=report.compiled, n_failing=report.n_failing, n_proven=report.n_proven)


class IterationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=1)
    flow: Flow
    ruleset_version: int = Field(default=0, ge=0)
    prompt_digest: str = ""
    completion_text: str = ""
    batch_stats: Optional[BatchStats] = None
    fpv_stats: Optional[FpvStats] = None
    coverage: Optional[CoverageReport] = None
    notes: str = ""
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    prompt_kind: str = ""
    rules_digest: str = ""
    rtl_iteration: Optional[int] = None
    artifacts: List[str] = []
    lint_categories: List[str] = []
    error: Optional[str] = None


class ConvergenceStatus(str, Enum):
    ConvergedFullProof = "converged_full_proof"
    ConvergedPlateau = "converged_plateau"
    Running = "running"
    Exhausted = "exhausted"


class ConvergenceState(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: ConvergenceStatus
    reason: str = ""

    @property
    def converged(self) -> bool:
        return self.status in (ConvergenceStatus.ConvergedFullProof, ConvergenceStatus.ConvergedPlateau)
