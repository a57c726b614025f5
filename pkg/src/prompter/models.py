from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..digest import sha256_hex
from ..frontend import estimate_tokens

SECTION_SEPARATOR = "\n\n"


class PromptKind(str, Enum):
    SvaGen = "SvaGen"
    AnnotationGen = "AnnotationGen"
    RtlGen = "RtlGen"


class Budget(BaseModel):
    model_config = ConfigDict(frozen=True)

    context_limit: int = Field(default=8192, gt=0)
    output_reserve: int = Field(default=2048, gt=0)

    @model_validator(mode="after")
    def reserve_below_limit(self):
        if self.output_reserve >= self.context_limit:
            raise ValueError("output_reserve must be smaller than context_limit")
        return self

    @property
    def input_limit(self) -> int:
        return self.context_limit - self.output_reserve


def join_sections(preamble: str, rules_text: str, payload: str, appended_sva: Optional[str]) -> str:
    # Fixed order: preamble, rules, payload, appended SVA.
    sections = [preamble, rules_text, payload, appended_sva or ""]
    return SECTION_SEPARATOR.join(s for s in sections if s)


class PromptBundle(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: PromptKind
    preamble: str = ""
    rules_text: str = ""
    payload: str
    appended_sva: Optional[str] = None
    token_estimate: int = 0
    stripped: bool = False

    @model_validator(mode="before")
    @classmethod
    def compute_estimate(cls, data):
        if isinstance(data, dict):
            text = join_sections(data.get("preamble", ""), data.get("rules_text", ""),
                                 data.get("payload", ""), data.get("appended_sva"))
            data = {**data, "token_estimate": estimate_tokens(text)}
        return data

    @model_validator(mode="after")
    def sva_only_for_rtl(self):
        if self.appended_sva is not None and self.kind != PromptKind.RtlGen:
            raise ValueError("appended_sva is only allowed on RTL-generation prompts")
        return self

    @property
    def text(self) -> str:
        return join_sections(self.preamble, self.rules_text, self.payload, self.appended_sva)

    @property
    def digest(self) -> str:
        return sha256_hex(self.text)
