from pathlib import Path
from typing import Union
import logging
import re

from pydantic import ValidationError

from ..errors import DuplicateRuleId, RuleParseError
from ..kvfile import format_record, iter_records
from .models import Category, Rule, RuleSet

# Configure logging
logger = logging.getLogger(__name__)

_VERSION_RE = re.compile(r"^#\s*version\s*:\s*(\d+)\s*$")


def _parse_lintable(field: str, lineno: int):
    if field == "false":
        return False, None
    if field.startswith("true:") and field[5:]:
        return True, field[5:]
    raise RuleParseError(f"lintable must be 'false' or 'true:<lint_key>', got {field!r}", lineno)


def parse_rules(text: str) -> RuleSet:
    version = 0
    for raw in text.splitlines():
        m = _VERSION_RE.match(raw.strip())
        if m:
            version = int(m.group(1))
            break

    rules = []
    seen = {}
    for lineno, parts in iter_records(text, 4):
        if len(parts) != 4:
            raise RuleParseError("expected 'id|category|lintable|text'", lineno)
        rule_id, category, lintable, body = parts
        if rule_id in seen:
            raise DuplicateRuleId(f"rule id {rule_id} on lines {seen[rule_id]} and {lineno}")
        seen[rule_id] = lineno
        is_lintable, key = _parse_lintable(lintable, lineno)
        try:
            rules.append(Rule(id=rule_id, category=Category(category), text=body,
                              lintable=is_lintable, lint_key=key))
        except ValidationError as e:
            raise RuleParseError(e.errors()[0]["msg"], lineno) from e
        except ValueError as e:
            raise RuleParseError(f"unknown category {category!r}", lineno) from e
    return RuleSet(rules=rules, version=version)


def dump_rules(rs: RuleSet) -> str:
    lines = [f"# version: {rs.version}"]
    for rule in rs.rules:
        lintable = f"true:{rule.lint_key}" if rule.lintable else "false"
        lines.append(format_record(rule.id, rule.category.value, lintable, rule.text))
    return "\n".join(lines) + "\n"


def load_rules(path: Union[str, Path]) -> RuleSet:
    path = Path(path)
    logger.debug(f"Loading rules from {path}")
    rs = parse_rules(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded {len(rs)} rules, version {rs.version}")
    return rs


def save_rules(rs: RuleSet, path: Union[str, Path]) -> None:
    path = Path(path)
    path.write_text(dump_rules(rs), encoding="utf-8")
    logger.debug(f"Saved {len(rs)} rules (version {rs.version}) to {path}")
