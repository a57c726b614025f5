from enum import Enum
from typing import Iterable, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..digest import sha256_hex


class Category(str, Enum):
    IN = "IN"        # internal-signal referencing
    SY = "SY"        # syntax
    WT = "WT"        # timing
    WS = "WS"        # semantics
    GEN = "GEN"      # output formatting directives
    STRAT = "STRAT"  # generation strategies


LINT_CATEGORIES = (Category.IN, Category.SY, Category.WT, Category.WS)


class Rule(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    category: Category
    text: str
    lintable: bool = False
    lint_key: Optional[str] = None

    @field_validator("id")
    @classmethod
    def id_is_plain(cls, v: str) -> str:
        if not v or "|" in v or any(ch.isspace() for ch in v):
            raise ValueError(f"rule id {v!r} must be non-empty without spaces or '|'")
        return v

    @field_validator("text")
    @classmethod
    def text_single_line(cls, v: str) -> str:
        v = v.strip()
        if not v or "\n" in v:
            raise ValueError("rule text must be one non-empty line")
        return v

    @model_validator(mode="after")
    def lint_key_when_lintable(self):
        if self.lintable and not self.lint_key:
            raise ValueError(f"rule {self.id} is lintable but names no lint_key")
        if not self.lintable and self.lint_key:
            raise ValueError(f"rule {self.id} names lint_key {self.lint_key} but is not lintable")
        return self


class RuleSet(BaseModel):
    """Ordered rule catalog. Order is prompt context and survives save/load."""
    model_config = ConfigDict(frozen=True)

    rules: List[Rule] = []
    version: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def unique_ids(self):
        seen = set()
        for rule in self.rules:
            if rule.id in seen:
                raise ValueError(f"duplicate rule id {rule.id}")
            seen.add(rule.id)
        return self

    def __len__(self) -> int:
        return len(self.rules)

    def get(self, rule_id: str) -> Optional[Rule]:
        return next((r for r in self.rules if r.id == rule_id), None)

    def filtered(self, categories: Optional[Iterable[Category]] = None) -> List[Rule]:
        if categories is None:
            return list(self.rules)
        wanted = {Category(c) for c in categories}
        return [r for r in self.rules if r.category in wanted]

    def lintable_keys(self) -> List[str]:
        return [r.lint_key for r in self.rules if r.lintable]

    def rule_for_key(self, lint_key: str) -> Optional[Rule]:
        return next((r for r in self.rules if r.lint_key == lint_key), None)

    @property
    def digest(self) -> str:
        # Version is excluded: the digest identifies rule content only.
        return sha256_hex("\n".join(f"{r.id}|{r.category.value}|{r.lint_key or ''}|{r.text}"
                                    for r in self.rules))

    def bumped(self) -> "RuleSet":
        return RuleSet(rules=self.rules, version=self.version + 1)

    def with_rules(self, rules: List[Rule]) -> "RuleSet":
        return RuleSet(rules=rules, version=self.version + 1)
