"""Lint report writers: JSON lines and plain text."""
import json
from typing import Iterable

from .models import LintFinding


def findings_to_jsonl(findings: Iterable[LintFinding]) -> str:
    return "".join(json.dumps(f.model_dump(mode="json")) + "\n" for f in findings)


def format_findings(findings: Iterable[LintFinding]) -> str:
    lines = []
    for f in findings:
        line, column = f.span
        where = f" [{f.assertion}]" if f.assertion else ""
        lines.append(f"{line}:{column}: {f.severity.value} {f.category.value}/{f.lint_key}{where}: {f.message}")
    return "\n".join(lines)
