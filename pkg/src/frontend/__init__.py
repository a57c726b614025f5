from typing import Dict

from .fsm import detect_fsm
from .lexer import KEYWORDS, Token, tokenize
from .models import (
    Direction, FsmInfo, Parameter, Port, RtlModule, SignalDecl, SignalKind, SourceFile, Width,
)
from .parser import parse_module
from .text import (
    DEFAULT_REGISTER_SUFFIXES, classify_signal, estimate_tokens, identifiers_in, rename_text,
    strip_comments, validate_mapping,
)


def rename_identifiers(module: RtlModule, mapping: Dict[str, str]) -> str:
    """Rename whole identifiers across the module source; returns the new source text."""
    validate_mapping(mapping, identifiers_in(module.source_text))
    return rename_text(module.source_text, mapping)


__all__ = [
    "DEFAULT_REGISTER_SUFFIXES",
    "Direction",
    "FsmInfo",
    "KEYWORDS",
    "Parameter",
    "Port",
    "RtlModule",
    "SignalDecl",
    "SignalKind",
    "SourceFile",
    "Token",
    "Width",
    "classify_signal",
    "detect_fsm",
    "estimate_tokens",
    "identifiers_in",
    "parse_module",
    "rename_identifiers",
    "rename_text",
    "strip_comments",
    "tokenize",
]
