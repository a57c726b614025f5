"""Text-level operations on RTL: comment stripping, token estimates, renaming."""
from typing import Dict, Iterable, List, Sequence
import logging
import math
import re

from ..errors import MappingCollision, UnknownIdentifier
from .lexer import COMMENT_KINDS, KEYWORDS, iter_spans
from .models import SignalKind

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_REGISTER_SUFFIXES = ("_reg", "_r", "_q")

_MARK = "\x00"
_MARKS_RE = re.compile(_MARK + "+")
_DELIMITERS = set(";,()[]{}")


def _is_word(ch: str) -> bool:
    return ch.isalnum() or ch in "_$'`"


def _needs_space(before: str, after: str) -> bool:
    # Removing a comment must not fuse the tokens on either side of it.
    if not before or not after or before.isspace() or after.isspace():
        return False
    if _is_word(before) and _is_word(after):
        return True
    return (not _is_word(before) and not _is_word(after)
            and before not in _DELIMITERS and after not in _DELIMITERS)


def _close_gap(line: str) -> str:
    def replace(m: re.Match) -> str:
        before = line[m.start() - 1] if m.start() > 0 else ""
        after = line[m.end()] if m.end() < len(line) else ""
        return " " if _needs_space(before, after) else ""
    return _MARKS_RE.sub(replace, line)


def strip_comments(text: str) -> str:
    """Remove `//` and `/* */` comments, keeping string literals verbatim.

    Lines that held a comment lose their trailing whitespace; lines left empty
    by the removal are dropped. Lines without comments are untouched.
    """
    pieces = []
    for m in iter_spans(text):
        pieces.append(_MARK if m.lastgroup in COMMENT_KINDS else m.group())
    marked = "".join(pieces)
    if _MARK not in marked:
        return text

    lines = []
    for line in marked.split("\n"):
        if _MARK not in line:
            lines.append(line)
            continue
        cleaned = _close_gap(line).rstrip()
        if cleaned.strip():
            lines.append(cleaned)
    return "\n".join(lines)


def estimate_tokens(text: str) -> int:
    """Provider-agnostic token estimate: one token per four characters."""
    return math.ceil(len(text) / 4)


def classify_signal(name: str, suffixes: Sequence[str] = DEFAULT_REGISTER_SUFFIXES) -> SignalKind:
    if not suffixes:
        raise ValueError("at least one register suffix is required")
    return SignalKind.Register if any(name.endswith(s) for s in suffixes) else SignalKind.Wire


def identifiers_in(text: str) -> List[str]:
    """Every identifier token in `text`, excluding comments, strings and keywords."""
    return [m.group() for m in iter_spans(text)
            if m.lastgroup == "ident" and m.group() not in KEYWORDS]


def rename_text(text: str, mapping: Dict[str, str]) -> str:
    """Replace whole identifier tokens; comments and strings are left alone."""
    out = []
    for m in iter_spans(text):
        token = m.group()
        if m.lastgroup == "ident" and token in mapping:
            out.append(mapping[token])
        else:
            out.append(token)
    return "".join(out)


def validate_mapping(mapping: Dict[str, str], existing: Iterable[str]) -> None:
    existing = set(existing)
    unknown = sorted(k for k in mapping if k not in existing)
    if unknown:
        raise UnknownIdentifier(f"identifiers not present in the module: {', '.join(unknown)}")

    targets = list(mapping.values())
    if len(set(targets)) != len(targets):
        raise MappingCollision("mapping is not injective")
    for source, target in mapping.items():
        if not re.fullmatch(r"[A-Za-z_][\w$]*", target) or target in KEYWORDS:
            raise MappingCollision(f"{target!r} is not a usable identifier")
        # A target may reuse a name only if that name is itself being renamed away.
        if target in existing and target not in mapping and target != source:
            raise MappingCollision(f"{source} -> {target} collides with an existing identifier")
