"""Regex lexer for the subset of SystemVerilog the frontend and sva-kit read."""
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator, List
import re

from ..errors import UnterminatedBlockComment

_TOKEN_RE = re.compile(r"""
      (?P<ws>\s+)
    | (?P<line_comment>//[^\n]*)
    | (?P<block_comment>/\*.*?\*/)
    | (?P<unterminated>/\*)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<directive>`[A-Za-z_]\w*)
    | (?P<number>(?:\d[\d_]*)?\s*'[sS]?[bBoOdDhH]\s*[0-9a-fA-FxXzZ?_]+
                 |\d[\d_]*(?:\.\d+)?(?:[eE][+-]?\d+)?
                 |'[01xXzZ](?![\w']))
    | (?P<system>\$[A-Za-z_][\w$]*)
    | (?P<escaped>\\\S+)
    | (?P<ident>[A-Za-z_][\w$]*)
    | (?P<op>\|->|\|=>|\#\#|<<<=|>>>=|<<<|>>>|===|!==|==\?|!=\?|<<=|>>=|&&&
            |<->|->|<=|>=|==|!=|&&|\|\||<<|>>|\+\+|--|\+=|-=|\*=|/=|\*\*|::|\+:|-:
            |~&|~\||~\^|\^~|\.\*|'\{|\[\*|\[=|\[->|[^\s])
""", re.VERBOSE | re.DOTALL)

COMMENT_KINDS = ("line_comment", "block_comment")

KEYWORDS = frozenset("""
    always always_comb always_ff always_latch and assert assign assume automatic before begin bind
    bit break buf byte case casex casez cell chandle class clocking cmos config const constraint
    context continue cover covergroup coverpoint cross deassign default defparam design disable
    dist do edge else end endcase endclass endclocking endconfig endfunction endgenerate endgroup
    endinterface endmodule endpackage endprimitive endprogram endproperty endsequence endspecify
    endtable endtask enum event expect export extends extern final first_match for force foreach
    forever fork forkjoin function generate genvar if iff ifnone ignore_bins illegal_bins import
    incdir include initial inout input inside instance int integer interface intersect join
    join_any join_none large liblist library local localparam logic longint macromodule matches
    medium modport module nand negedge new nmos nor noshowcancelled not notif0 notif1 null or
    output package packed parameter pmos posedge primitive priority program property protected
    pull0 pull1 pulldown pullup pulsestyle_ondetect pulsestyle_onevent pure rand randc randcase
    randsequence rcmos real realtime ref reg release repeat return rnmos rpmos rtran rtranif0
    rtranif1 scalared sequence shortint shortreal showcancelled signed small solve specify
    specparam static string strong0 strong1 struct super supply0 supply1 table tagged task this
    throughout time timeprecision timeunit tran tranif0 tranif1 tri tri0 tri1 triand trior
    trireg type typedef union unique unique0 unsigned until until_with use uwire var vectored
    virtual void wait wait_order wand weak0 weak1 while wildcard wire with within wor xnor xor
    s_eventually eventually s_always nexttime s_nexttime s_until s_until_with implies
    accept_on reject_on sync_accept_on sync_reject_on restrict let checker endchecker global
""".split())


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    start: int
    line: int
    column: int

    @property
    def end(self) -> int:
        return self.start + len(self.text)

    @property
    def is_ident(self) -> bool:
        return self.kind in ("ident", "escaped") and self.text not in KEYWORDS

    @property
    def is_comment(self) -> bool:
        return self.kind in COMMENT_KINDS

    def __str__(self) -> str:
        return self.text


class _LineIndex:
    def __init__(self, text: str):
        self.starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def position(self, offset: int):
        line = bisect_right(self.starts, offset)
        return line, offset - self.starts[line - 1] + 1


def iter_spans(text: str) -> Iterator[re.Match]:
    """Yield every lexical match, whitespace and comments included."""
    for m in _TOKEN_RE.finditer(text):
        if m.lastgroup == "unterminated":
            line, col = _LineIndex(text).position(m.start())
            raise UnterminatedBlockComment(f"unterminated block comment at line {line}, column {col}")
        yield m


def tokenize(text: str, keep_comments: bool = False) -> List[Token]:
    index = _LineIndex(text)
    tokens = []
    for m in iter_spans(text):
        kind = m.lastgroup
        if kind == "ws" or (kind in COMMENT_KINDS and not keep_comments):
            continue
        line, col = index.position(m.start())
        tokens.append(Token(kind, m.group(), m.start(), line, col))
    return tokens


def match_close(tokens: List[Token], i: int, open_text: str, close_texts) -> int:
    """Index of the token closing the group opened at tokens[i], or -1."""
    if isinstance(close_texts, str):
        close_texts = (close_texts,)
    depth = 0
    for j in range(i, len(tokens)):
        text = tokens[j].text
        if text == open_text:
            depth += 1
        elif text in close_texts:
            depth -= 1
            if depth == 0:
                return j
    return -1


def match_paren(tokens: List[Token], i: int) -> int:
    """Index of the `)`/`]`/`}` closing the bracket at tokens[i], or -1."""
    pairs = {"(": ")", "[": "]", "{": "}", "'{": "}"}
    stack = []
    for j in range(i, len(tokens)):
        text = tokens[j].text
        if text in pairs:
            stack.append(pairs[text])
        elif stack and text == stack[-1]:
            stack.pop()
            if not stack:
                return j
        elif text in (")", "]", "}"):
            return -1
    return -1


def split_top_level(tokens: List[Token], separator: str = ",") -> List[List[Token]]:
    """Split a token run on `separator` outside any bracket nesting."""
    chunks, current, depth = [], [], 0
    for tok in tokens:
        if tok.text in ("(", "[", "{", "'{"):
            depth += 1
        elif tok.text in (")", "]", "}"):
            depth -= 1
        if tok.text == separator and depth == 0:
            chunks.append(current)
            current = []
        else:
            current.append(tok)
    if current:
        chunks.append(current)
    return chunks


def source_slice(text: str, tokens: List[Token]) -> str:
    if not tokens:
        return ""
    return text[tokens[0].start:tokens[-1].end]
