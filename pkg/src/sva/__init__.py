from .lint import CHECKS, LintCheck, blocking_of, check_categories, errors_of, lint, warnings_of
from .merge import dedup, diff_batches
from .models import (
    ACCEPTED_PREFIXES, Assertion, AssertionBatch, AssertionKind, BatchDiff, Fragment, LintFinding,
    LoopWrapper, Severity, Side, SignalRef,
)
from .parser import parse_batch
from .report import findings_to_jsonl, format_findings

__all__ = [
    "ACCEPTED_PREFIXES",
    "Assertion",
    "AssertionBatch",
    "AssertionKind",
    "BatchDiff",
    "CHECKS",
    "Fragment",
    "LintCheck",
    "LintFinding",
    "LoopWrapper",
    "Severity",
    "Side",
    "SignalRef",
    "blocking_of",
    "check_categories",
    "dedup",
    "diff_batches",
    "errors_of",
    "findings_to_jsonl",
    "format_findings",
    "lint",
    "parse_batch",
    "warnings_of",
]
