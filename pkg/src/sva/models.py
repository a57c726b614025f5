from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..rulebook import Category

ACCEPTED_PREFIXES = ("as__", "asgpt__")


class AssertionKind(str, Enum):
    SameCycle = "same_cycle"
    NextCycle = "next_cycle"
    Immediate = "immediate"
    Other = "other"


class Side(str, Enum):
    Pre = "pre"
    Post = "post"
    Expr = "expr"  # no implication


class Severity(str, Enum):
    Error = "error"
    Warning = "warning"


class SignalRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    prefix: Optional[str] = None
    in_index: bool = False
    under_past: bool = False
    side: Side = Side.Expr
    line: int = 0
    column: int = 0

    @property
    def prefixed(self) -> bool:
        return self.prefix is not None


class LoopWrapper(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str = "generate_for"  # or "foreach"
    genvar: str
    bound: str
    label: Optional[str] = None

    def header(self, fallback_label: str) -> str:
        if self.kind == "foreach":
            return f"foreach ({self.bound}[{self.genvar}]) begin: {self.label or fallback_label}"
        return (f"for (genvar {self.genvar}=0; {self.genvar}<{self.bound}; {self.genvar}={self.genvar}+1) "
                f"begin: {self.label or fallback_label}")


class Fragment(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    line: int = 0
    column: int = 0


class Assertion(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    kind: AssertionKind
    raw: str
    precondition: str = ""
    postcondition: str = ""
    signals: Tuple[SignalRef, ...] = ()
    loops: Tuple[LoopWrapper, ...] = ()
    leading_comment: Optional[str] = None
    keyword: str = "assert"
    normalized: str = ""
    line: int = 0
    column: int = 0

    @property
    def loop_wrapper(self) -> Optional[Tuple[str, str]]:
        if not self.loops:
            return None
        return self.loops[-1].genvar, self.loops[-1].bound

    @property
    def identity(self) -> str:
        """Whitespace- and comment-insensitive key of the expression and its loop nest."""
        loops = ";".join(f"{lp.kind}:{lp.genvar}<{lp.bound}" for lp in self.loops)
        return f"{loops}|{self.normalized}"

    @property
    def signal_names(self) -> frozenset:
        return frozenset(s.name for s in self.signals)

    def renamed(self, new_name: str) -> "Assertion":
        return self.model_copy(update={"name": new_name, "raw": new_name + self.raw[len(self.name):]})

    def render(self) -> str:
        lines = []
        if self.leading_comment:
            lines.append(self.leading_comment)
        indent = ""
        for depth, loop in enumerate(self.loops):
            lines.append(indent + loop.header(f"gen_{self.name.split('[')[0]}_{depth}"))
            indent += "  "
        lines.append(indent + self.raw)
        for _ in self.loops:
            indent = indent[:-2]
            lines.append(indent + "end")
        return "\n".join(lines)


class AssertionBatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = 0
    assertions: List[Assertion] = []
    residue: List[Fragment] = []
    scaffold: List[Fragment] = []

    @property
    def unparsed_residue(self) -> str:
        return "\n".join(f.text for f in self.residue)

    @property
    def names(self) -> List[str]:
        return [a.name for a in self.assertions]

    def __len__(self) -> int:
        return len(self.assertions)

    def render(self) -> str:
        return "\n\n".join(a.render() for a in self.assertions) + ("\n" if self.assertions else "")


class LintFinding(BaseModel):
    model_config = ConfigDict(frozen=True)

    lint_key: str
    category: Category
    severity: Severity
    message: str
    assertion: str = ""
    span: Tuple[int, int] = (0, 0)


class BatchDiff(BaseModel):
    identical: int = Field(default=0, ge=0)
    variants: int = Field(default=0, ge=0)
    only_a: int = Field(default=0, ge=0)
    only_b: int = Field(default=0, ge=0)
