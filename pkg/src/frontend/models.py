from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Width = Union[int, str]


class Direction(str, Enum):
    Input = "input"
    Output = "output"
    Inout = "inout"


class SignalKind(str, Enum):
    Register = "register"
    Wire = "wire"


class SourceFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str = "<memory>"
    text: str
    line_count: int = 0

    @model_validator(mode="before")
    @classmethod
    def count_lines(cls, data):
        # splitlines() treats a trailing newline as a terminator, not a new line
        if isinstance(data, dict) and "text" in data:
            data = {**data, "line_count": len(str(data["text"]).splitlines())}
        return data

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "SourceFile":
        path = Path(path)
        return cls(path=str(path), text=path.read_text(encoding="utf-8"))

    @classmethod
    def from_text(cls, text: str, path: str = "<memory>") -> "SourceFile":
        return cls(path=path, text=text)


class Parameter(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    default: str = ""


class Port(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    direction: Direction
    width: Width = 1
    data_type: str = "logic"
    range_text: str = ""
    is_clock: bool = False
    is_reset: bool = False
    active_low: bool = False


class SignalDecl(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    width: Width = 1
    kind: SignalKind
    array_depth: int = Field(default=0, ge=0)
    data_type: str = "logic"


class FsmInfo(BaseModel):
    model_config = ConfigDict(frozen=True)

    state_signal: str
    states: List[str] = []
    transitions_detected: bool = False

    @model_validator(mode="after")
    def states_when_transitions(self):
        if self.transitions_detected and not self.states:
            raise ValueError("an FSM with transitions must list its states")
        return self


class RtlModule(BaseModel):
    """Declaration-level view of one SystemVerilog module."""
    model_config = ConfigDict(frozen=True)

    name: str
    parameters: List[Parameter] = []
    ports: List[Port] = []
    internals: List[SignalDecl] = []
    body_text: str = ""
    stripped_text: str = ""
    # Everything below is extra context the downstream flows use.
    localparams: List[Parameter] = []
    enum_types: Dict[str, List[str]] = {}
    genvars: List[str] = []
    header_text: str = ""
    source_text: str = ""
    path: str = "<memory>"

    @model_validator(mode="after")
    def unique_names(self):
        port_names = [p.name for p in self.ports]
        if len(port_names) != len(set(port_names)):
            raise ValueError(f"duplicate port names in module {self.name}")
        internal_names = [s.name for s in self.internals]
        if len(internal_names) != len(set(internal_names)):
            raise ValueError(f"duplicate internal names in module {self.name}")
        overlap = set(port_names) & set(internal_names)
        if overlap:
            raise ValueError(f"internals shadow ports: {sorted(overlap)}")
        if sum(p.is_clock for p in self.ports) > 1 or sum(p.is_reset for p in self.ports) > 1:
            raise ValueError("at most one clock and one reset port may be flagged")
        return self

    def port(self, name: str) -> Optional[Port]:
        return next((p for p in self.ports if p.name == name), None)

    def internal(self, name: str) -> Optional[SignalDecl]:
        return next((s for s in self.internals if s.name == name), None)

    @property
    def port_names(self) -> List[str]:
        return [p.name for p in self.ports]

    @property
    def internal_names(self) -> List[str]:
        return [s.name for s in self.internals]

    @property
    def clock(self) -> Optional[Port]:
        return next((p for p in self.ports if p.is_clock), None)

    @property
    def reset(self) -> Optional[Port]:
        return next((p for p in self.ports if p.is_reset), None)

    @property
    def enum_members(self) -> List[str]:
        return [m for members in self.enum_types.values() for m in members]

    @property
    def constant_names(self) -> List[str]:
        """Parameters, localparams and enum members: names usable as values."""
        return ([p.name for p in self.parameters] + [p.name for p in self.localparams]
                + self.enum_members)

    def registers(self) -> List[SignalDecl]:
        return [s for s in self.internals if s.kind == SignalKind.Register]

    def signal_widths(self) -> List[Tuple[str, Width]]:
        return [(p.name, p.width) for p in self.ports] + [(s.name, s.width) for s in self.internals]
