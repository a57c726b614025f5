"""Best-effort extraction of named assertions from LLM output.

Nothing here raises on malformed input: text that is not an assertion or a
recognised structural line ends up in the batch residue.
"""
from typing import List, Optional, Tuple
import logging
import re

from ..errors import UnterminatedBlockComment
from ..frontend import RtlModule, Token, tokenize
from ..frontend.lexer import match_close, match_paren, source_slice, split_top_level
from .models import (
    Assertion, AssertionBatch, AssertionKind, Fragment, LoopWrapper, Side, SignalRef,
)

# Configure logging
logger = logging.getLogger(__name__)

ASSERTION_KEYWORDS = ("assert", "assume", "cover")
_FENCE_RE = re.compile(r"^[ \t]*```[^\n]*$", re.MULTILINE)
_IMPLICATIONS = ("|->", "|=>")


def _blank_fences(text: str) -> Tuple[str, List[Fragment]]:
    fences = []

    def blank(m: re.Match) -> str:
        line = text.count("\n", 0, m.start()) + 1
        fences.append(Fragment(text=m.group().strip(), line=line, column=1))
        return " " * len(m.group())

    return _FENCE_RE.sub(blank, text), fences


def _unwrap(tokens: List[Token]) -> List[Token]:
    while len(tokens) >= 2 and tokens[0].text == "(" and match_paren(tokens, 0) == len(tokens) - 1:
        tokens = tokens[1:-1]
    return tokens


def _strip_clocking(tokens: List[Token]) -> List[Token]:
    """Drop a leading `@(...)` and `disable iff (...)` from a property expression."""
    changed = True
    while changed and tokens:
        changed = False
        if tokens[0].text == "@" and len(tokens) > 1 and tokens[1].text == "(":
            tokens = tokens[match_paren(tokens, 1) + 1:]
            changed = True
        elif tokens[0].text == "disable" and len(tokens) > 2 and tokens[1].text == "iff":
            tokens = tokens[match_paren(tokens, 2) + 1:]
            changed = True
        tokens = _unwrap(tokens)
    return tokens


def _implication(tokens: List[Token]) -> int:
    depth = 0
    for k, tok in enumerate(tokens):
        if tok.text in ("(", "[", "{", "'{"):
            depth += 1
        elif tok.text in (")", "]", "}"):
            depth -= 1
        elif depth == 0 and tok.text in _IMPLICATIONS:
            return k
    return -1


def _references(tokens: List[Token], side: Side) -> List[SignalRef]:
    refs = []
    bracket = 0
    past_depth: List[int] = []
    paren = 0
    k = 0
    while k < len(tokens):
        tok = tokens[k]
        if tok.text == "[":
            bracket += 1
        elif tok.text == "]":
            bracket -= 1
        elif tok.text == "(":
            paren += 1
        elif tok.text == ")":
            paren -= 1
            if past_depth and paren < past_depth[-1]:
                past_depth.pop()
        elif tok.kind == "system" and tok.text == "$past" and k + 1 < len(tokens) and tokens[k + 1].text == "(":
            past_depth.append(paren + 1)
        elif tok.is_ident and not (k > 0 and tokens[k - 1].text == "."):
            prefix_parts = []
            j = k
            while j + 2 < len(tokens) and tokens[j + 1].text == "." and tokens[j + 2].is_ident:
                prefix_parts.append(tokens[j].text)
                j += 2
            follows = tokens[j + 1].text if j + 1 < len(tokens) else ""
            if follows != "(" or prefix_parts:
                refs.append(SignalRef(
                    name=tokens[j].text,
                    prefix=".".join(prefix_parts) if prefix_parts else None,
                    in_index=bracket > 0,
                    under_past=bool(past_depth),
                    side=side,
                    line=tok.line,
                    column=tok.column,
                ))
            k = j
        k += 1
    return refs


def _normalize(tokens: List[Token]) -> str:
    return " ".join(t.text for t in tokens if not t.is_comment)


class _BatchParser:
    def __init__(self, text: str, batch_id: int):
        self.text, self.fences = _blank_fences(text)
        self.batch_id = batch_id
        self.assertions: List[Assertion] = []
        self.residue: List[Fragment] = []
        self.scaffold: List[Fragment] = list(self.fences)
        self.pending: List[Token] = []
        self.loops: List[Optional[LoopWrapper]] = []
        self.single_loops: List[LoopWrapper] = []

    def fragment(self, tokens: List[Token]) -> Fragment:
        return Fragment(text=source_slice(self.text, tokens), line=tokens[0].line, column=tokens[0].column)

    def flush_comments(self) -> None:
        if self.pending:
            self.residue.append(self.fragment(self.pending))
            self.pending = []

    def parse(self) -> AssertionBatch:
        try:
            self.tok = tokenize(self.text, keep_comments=True)
        except UnterminatedBlockComment as e:
            logger.warning(f"Batch {self.batch_id}: {e}; whole text kept as residue")
            return AssertionBatch(id=self.batch_id, residue=[Fragment(text=self.text.strip(), line=1, column=1)]
                                  if self.text.strip() else [], scaffold=self.scaffold)

        i = 0
        while i < len(self.tok):
            i = self.step(i)
        self.flush_comments()
        if self.residue:
            logger.warning(f"Batch {self.batch_id}: {len(self.residue)} unparsed fragment(s)")
        logger.debug(f"Batch {self.batch_id}: {len(self.assertions)} assertions")
        return AssertionBatch(id=self.batch_id, assertions=self.assertions,
                              residue=self.residue, scaffold=self.scaffold)

    def step(self, i: int) -> int:
        tok = self.tok[i]
        if tok.is_comment:
            if i > 0 and not self.tok[i - 1].is_comment and self.tok[i - 1].line == tok.line:
                self.residue.append(self.fragment([tok]))  # trailing comment
                return i + 1
            # A blank line between a comment and what follows detaches it.
            if self.pending and tok.line > self.pending[-1].line + self.pending[-1].text.count("\n") + 1:
                self.flush_comments()
            self.pending.append(tok)
            return i + 1
        if self.pending and tok.line > self.pending[-1].line + self.pending[-1].text.count("\n") + 1:
            self.flush_comments()

        end = self.try_assertion(i)
        if end is not None:
            return end
        self.flush_comments()

        word = tok.text
        if word in ("generate", "endgenerate"):
            self.scaffold.append(self.fragment([tok]))
            return i + 1
        if word in ("for", "foreach"):
            end = self.try_loop(i)
            if end is not None:
                return end
        if word == "begin":
            self.loops.append(None)
            j = self.skip_label(i + 1)
            self.scaffold.append(self.fragment(self.tok[i:j]))
            return j
        if word == "end" and self.loops:
            self.loops.pop()
            j = self.skip_label(i + 1)
            self.scaffold.append(self.fragment(self.tok[i:j]))
            return j
        if word == "property":
            close = match_close(self.tok, i, "property", "endproperty")
            return self.to_residue(i, close + 1 if close > 0 else len(self.tok))
        if word in ("always", "always_ff", "always_comb", "initial"):
            return self.to_residue(i, self.statement_end(i + 1))
        # Anything else: the rest of the line.
        j = i
        while j < len(self.tok) and self.tok[j].line == tok.line and not self.tok[j].is_comment:
            j += 1
        return self.to_residue(i, j)

    def to_residue(self, i: int, j: int) -> int:
        j = max(j, i + 1)
        self.single_loops = []
        self.residue.append(self.fragment(self.tok[i:j]))
        return j

    def skip_label(self, i: int) -> int:
        if i + 1 < len(self.tok) and self.tok[i].text == ":" and self.tok[i + 1].is_ident:
            return i + 2
        return i

    def statement_end(self, i: int) -> int:
        tok = self.tok
        if i < len(tok) and tok[i].text == "@" and i + 1 < len(tok) and tok[i + 1].text == "(":
            i = match_paren(tok, i + 1) + 1
        if i < len(tok) and tok[i].text == "begin":
            close = match_close(tok, i, "begin", "end")
            return self.skip_label(close + 1) if close > 0 else len(tok)
        while i < len(tok) and tok[i].text != ";":
            i += 1
        return i + 1

    # -=-=-=-=-=- LOOPS -=-=-=-=-=- #

    def try_loop(self, i: int) -> Optional[int]:
        tok = self.tok
        if i + 1 >= len(tok) or tok[i + 1].text != "(":
            return None
        close = match_paren(tok, i + 1)
        if close < 0:
            return None
        inner = [t for t in tok[i + 2:close] if not t.is_comment]
        if tok[i].text == "foreach":
            # foreach (arr[i])
            if len(inner) < 4 or inner[-1].text != "]":
                return None
            open_idx = max(k for k, t in enumerate(inner) if t.text == "[")
            loop = LoopWrapper(kind="foreach", genvar=source_slice(self.text, inner[open_idx + 1:-1]),
                               bound=source_slice(self.text, inner[:open_idx]))
        else:
            parts = split_top_level(inner, ";")
            if len(parts) != 3 or not parts[0]:
                return None
            init = [t for t in parts[0] if t.text not in ("genvar", "int", "integer")]
            if not init or not init[0].is_ident:
                return None
            cond = parts[1]
            cmp_idx = next((k for k, t in enumerate(cond) if t.text in ("<", "<=", "!=")), None)
            if cmp_idx is None:
                return None
            loop = LoopWrapper(kind="generate_for", genvar=init[0].text,
                               bound=source_slice(self.text, cond[cmp_idx + 1:]))

        j = close + 1
        if j < len(tok) and tok[j].text == "begin":
            k = self.skip_label(j + 1)
            label = tok[k - 1].text if k > j + 1 else None
            loop = loop.model_copy(update={"label": label})
            self.loops.append(loop)
            self.scaffold.append(self.fragment(tok[i:k]))
            return k
        self.scaffold.append(self.fragment(tok[i:close + 1]))
        self.single_loops.append(loop)
        return j

    def active_loops(self) -> Tuple[LoopWrapper, ...]:
        return tuple(lp for lp in self.loops if lp is not None) + tuple(self.single_loops)

    # -=-=-=-=-=- ASSERTIONS -=-=-=-=-=- #

    def try_assertion(self, i: int) -> Optional[int]:
        tok = self.tok
        if not tok[i].is_ident:
            return None
        j = i + 1
        while j < len(tok) and tok[j].text == "[":
            close = match_paren(tok, j)
            if close < 0:
                return None
            j = close + 1
        if j + 1 >= len(tok) or tok[j].text != ":" or tok[j + 1].text not in ASSERTION_KEYWORDS:
            return None
        name = source_slice(self.text, tok[i:j]).replace(" ", "")
        k = j + 1
        keyword = tok[k].text
        k += 1
        concurrent = k < len(tok) and tok[k].text in ("property", "sequence")
        if concurrent:
            k += 1
        if k >= len(tok) or tok[k].text != "(":
            return None
        close = match_paren(tok, k)
        if close < 0:
            return None
        end = close + 1
        depth = 0
        while end < len(tok):
            t = tok[end].text
            if t in ("(", "[", "{"):
                depth += 1
            elif t in (")", "]", "}"):
                depth -= 1
            elif t == ";" and depth <= 0:
                break
            elif depth <= 0 and self.try_assertion_start(end):
                end -= 1
                break
            end += 1
        end = min(end, len(tok) - 1)
        raw_tokens = tok[i:end + 1]
        expr = [t for t in tok[k + 1:close] if not t.is_comment]

        self.append_assertion(name, keyword, concurrent, expr, raw_tokens, tok[i])
        if self.single_loops:
            self.single_loops = []
        return end + 1

    def try_assertion_start(self, i: int) -> bool:
        tok = self.tok
        return (tok[i].is_ident and i + 2 < len(tok) and tok[i + 1].text == ":"
                and tok[i + 2].text in ASSERTION_KEYWORDS)

    def append_assertion(self, name: str, keyword: str, concurrent: bool, expr: List[Token],
                         raw_tokens: List[Token], first: Token) -> None:
        body = _strip_clocking(_unwrap(expr))
        split = _implication(body)
        if split >= 0:
            pre, post = body[:split], body[split + 1:]
            kind = AssertionKind.SameCycle if body[split].text == "|->" else AssertionKind.NextCycle
            signals = _references(pre, Side.Pre) + _references(post, Side.Post)
        else:
            pre, post = [], body
            kind = AssertionKind.Other if concurrent else AssertionKind.Immediate
            signals = _references(post, Side.Expr)

        leading = None
        if self.pending:
            leading = source_slice(self.text, self.pending)
            self.pending = []
        self.assertions.append(Assertion(
            name=name,
            kind=kind,
            raw=source_slice(self.text, raw_tokens),
            precondition=source_slice(self.text, pre).strip(),
            postcondition=source_slice(self.text, post).strip(),
            signals=tuple(signals),
            loops=self.active_loops(),
            leading_comment=leading,
            keyword=keyword,
            normalized=_normalize(expr),
            line=first.line,
            column=first.column,
        ))


def parse_batch(completion_text: str, module: Optional[RtlModule] = None, batch_id: int = 0) -> AssertionBatch:
    """Parse one completion into an AssertionBatch.

    `module` is accepted for symmetry with lint; parsing itself is module-independent.
    """
    return _BatchParser(completion_text, batch_id).parse()
