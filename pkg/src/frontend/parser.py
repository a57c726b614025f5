"""Declaration-level SystemVerilog module parser.

Headers and declaration statements are parsed; procedural code is skipped and
kept only as text.
"""
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union
import logging
import re
import traceback

from ..errors import (
    DuplicateDeclaration, IncludeNotSupported, MultipleModules, NoModuleFound,
    UnbalancedDelimiters, UnterminatedBlockComment,
)
from .lexer import Token, match_close, match_paren, source_slice, split_top_level, tokenize
from .models import Direction, Parameter, Port, RtlModule, SignalDecl, SourceFile, Width
from .text import DEFAULT_REGISTER_SUFFIXES, classify_signal, strip_comments

# Configure logging
logger = logging.getLogger(__name__)

DIRECTIONS = {"input", "output", "inout"}
DATA_TYPES = {
    "logic", "reg", "wire", "bit", "byte", "int", "integer", "shortint", "longint", "tri",
    "wand", "wor", "uwire", "supply0", "supply1", "var", "time", "real", "shortreal", "tri0",
    "tri1", "triand", "trior", "trireg", "signed", "unsigned", "enum", "struct", "union",
}
PROCEDURAL = {"always", "always_ff", "always_comb", "always_latch", "initial", "final"}
CLOCK_NAMES = {"clk", "clock"}
RESET_NAMES = {"rst", "rst_n", "reset"}

_BLOCK_PAIRS = {
    "(": ")", "[": "]", "{": "}", "'{": "}",
    "begin": "end", "fork": ("join", "join_any", "join_none"),
    "case": "endcase", "casez": "endcase", "casex": "endcase", "randcase": "endcase",
    "generate": "endgenerate", "function": "endfunction", "task": "endtask",
}


def _check_balance(tokens: List[Token]) -> None:
    closers = set()
    for close in _BLOCK_PAIRS.values():
        closers.update(close if isinstance(close, tuple) else (close,))
    stack: List[Tuple[Token, object]] = []
    for tok in tokens:
        if tok.text in _BLOCK_PAIRS and tok.kind in ("op", "ident"):
            stack.append((tok, _BLOCK_PAIRS[tok.text]))
        elif tok.text in closers and tok.kind in ("op", "ident"):
            if not stack:
                raise UnbalancedDelimiters(f"unexpected '{tok.text}' at line {tok.line}")
            opener, expected = stack.pop()
            allowed = expected if isinstance(expected, tuple) else (expected,)
            if tok.text not in allowed:
                raise UnbalancedDelimiters(
                    f"'{opener.text}' at line {opener.line} closed by '{tok.text}' at line {tok.line}")
    if stack:
        opener, _ = stack[-1]
        raise UnbalancedDelimiters(f"'{opener.text}' at line {opener.line} is never closed")


def _width_of(dims: List[List[Token]], text: str) -> Tuple[Width, str]:
    """Bit width of packed dimensions: an int when numeric, else expression text."""
    if not dims:
        return 1, ""
    range_text = "".join(source_slice(text, d) for d in dims)
    widths: List[Width] = []
    for dim in dims:
        inner = source_slice(text, dim[1:-1]).strip()
        if ":" not in inner:
            widths.append(inner)
            continue
        msb, lsb = (part.strip() for part in inner.split(":", 1))
        if re.fullmatch(r"\d+", msb) and re.fullmatch(r"\d+", lsb):
            widths.append(abs(int(msb) - int(lsb)) + 1)
        elif lsb == "0" and re.fullmatch(r".+?\s*-\s*1", msb):
            widths.append(re.sub(r"\s*-\s*1$", "", msb))
        else:
            widths.append(f"({msb})-({lsb})+1")
    if all(isinstance(w, int) for w in widths):
        total = 1
        for w in widths:
            total *= w
        return total, range_text
    if len(widths) == 1:
        return widths[0], range_text
    return "*".join(f"({w})" for w in widths), range_text


class _ModuleParser:
    def __init__(self, text: str, path: str, suffixes: Sequence[str],
                 clock: Optional[str], reset: Optional[str]):
        self.text = text
        self.path = path
        self.suffixes = tuple(suffixes)
        self.clock_name = clock
        self.reset_name = reset
        self.parameters: List[Parameter] = []
        self.localparams: List[Parameter] = []
        self.ports: List[dict] = []
        self.nonansi_names: List[str] = []
        self.internals: Dict[str, SignalDecl] = {}
        self.enum_types: Dict[str, List[str]] = {}
        self.user_types: Set[str] = set()
        self.genvars: List[str] = []
        self.tok: List[Token] = []

    # -=-=-=-=-=- ENTRY -=-=-=-=-=- #

    def parse(self) -> RtlModule:
        if re.search(r"^\s*`include\b", self.text, re.MULTILINE):
            raise IncludeNotSupported(f"{self.path}: `include directives are not supported")
        try:
            self.tok = tokenize(self.text)
        except UnterminatedBlockComment as e:
            raise UnbalancedDelimiters(str(e)) from e

        starts = [i for i, t in enumerate(self.tok) if t.text in ("module", "macromodule")]
        ends = [i for i, t in enumerate(self.tok) if t.text == "endmodule"]
        if not starts:
            raise NoModuleFound(f"{self.path}: no module ... endmodule region")
        if len(starts) > 1:
            names = [self.tok[i + 1].text for i in starts if i + 1 < len(self.tok)]
            raise MultipleModules(f"{self.path}: {len(starts)} modules found ({', '.join(names)})")
        if len(ends) != 1 or ends[0] < starts[0]:
            raise UnbalancedDelimiters(f"{self.path}: module is not closed by a single endmodule")

        start, end = starts[0], ends[0]
        _check_balance(self.tok[start + 1:end])

        i = start + 1
        if self.tok[i].text in ("automatic", "static"):
            i += 1
        name_tok = self.tok[i]
        if not name_tok.is_ident:
            raise NoModuleFound(f"{self.path}: module name missing at line {name_tok.line}")
        i = self._header(i + 1)
        header_end = i

        logger.debug(f"Parsed header of {name_tok.text}: {len(self.ports)} ANSI ports, "
                     f"{len(self.parameters)} parameters")
        self._walk(header_end, end, 0)

        body_start = self.tok[header_end - 1].end if header_end > 0 else 0
        body_text = self.text[body_start:self.tok[end].start]
        source_text = self.text[self.tok[start].start:self.tok[end].end]
        header_text = self.text[self.tok[start].start:self.tok[header_end - 1].end]

        return RtlModule(
            name=name_tok.text,
            parameters=self.parameters,
            ports=self._finish_ports(),
            internals=list(self.internals.values()),
            body_text=body_text,
            stripped_text=strip_comments(body_text),
            localparams=self.localparams,
            enum_types=self.enum_types,
            genvars=self.genvars,
            header_text=header_text,
            source_text=source_text,
            path=self.path,
        )

    # -=-=-=-=-=- HEADER -=-=-=-=-=- #

    def _header(self, i: int) -> int:
        tok = self.tok
        while tok[i].text == "import":
            i = self._skip_to_semicolon(i)
        if tok[i].text == "#":
            close = match_paren(tok, i + 1)
            for chunk in split_top_level(tok[i + 2:close]):
                self._parameter_chunk(chunk, self.parameters)
            i = close + 1
        if tok[i].text == "(":
            close = match_paren(tok, i)
            self._port_list(tok[i + 1:close])
            i = close + 1
        if tok[i].text != ";":
            raise UnbalancedDelimiters(f"expected ';' after module header at line {tok[i].line}")
        return i + 1

    def _parameter_chunk(self, chunk: List[Token], target: List[Parameter]) -> None:
        chunk = [t for t in chunk if t.text not in ("parameter", "localparam")]
        if not chunk or chunk[0].text == "type":
            return
        eq = next((k for k, t in enumerate(chunk) if t.text == "="), None)
        head = chunk if eq is None else chunk[:eq]
        names = [t for t in head if t.is_ident]
        if not names:
            return
        default = source_slice(self.text, chunk[eq + 1:]).strip() if eq is not None else ""
        target.append(Parameter(name=names[-1].text, default=default))

    def _port_list(self, tokens: List[Token]) -> None:
        chunks = split_top_level(tokens)
        if not any(c and c[0].text in DIRECTIONS for c in chunks):
            # Non-ANSI: names only, directions arrive in the body.
            for chunk in chunks:
                idents = [t for t in chunk if t.is_ident]
                if idents:
                    self.nonansi_names.append(idents[-1].text)
            return
        previous = {"direction": Direction.Input, "data_type": "logic", "dims": []}
        for chunk in chunks:
            port = self._declarator(chunk, previous)
            if port:
                previous = port
                self._add_port(port)

    def _declarator(self, chunk: List[Token], previous: dict) -> Optional[dict]:
        """Parse `[direction] [type] [packed dims] name [unpacked dims] [= default]`."""
        eq = next((k for k, t in enumerate(chunk) if t.text == "="), len(chunk))
        chunk = chunk[:eq]
        if not chunk:
            return None
        k = len(chunk) - 1
        while k >= 0 and chunk[k].text == "]":
            open_idx = max(j for j in range(k) if chunk[j].text == "[" and match_paren(chunk, j) == k)
            k = open_idx - 1
        if k < 0 or not chunk[k].is_ident:
            return None
        name = chunk[k].text
        head = chunk[:k]

        direction = None
        if head and head[0].text in DIRECTIONS:
            direction = Direction(head[0].text)
            head = head[1:]
        dims: List[List[Token]] = []
        type_tokens: List[Token] = []
        j = 0
        while j < len(head):
            if head[j].text == "[":
                close = match_paren(head, j)
                dims.append(head[j:close + 1])
                j = close + 1
            else:
                if head[j].text not in ("signed", "unsigned"):
                    type_tokens.append(head[j])
                j += 1
        if direction is None and not type_tokens and not dims:
            return {**previous, "name": name}
        data_type = source_slice(self.text, type_tokens) if type_tokens else "logic"
        if data_type in ("wire", "reg", "var"):
            data_type = "logic"
        return {
            "name": name,
            "direction": direction or previous["direction"],
            "data_type": data_type,
            "dims": dims,
        }

    def _add_port(self, port: dict) -> None:
        if any(p["name"] == port["name"] for p in self.ports):
            raise DuplicateDeclaration(f"port {port['name']} declared twice")
        self.ports.append(port)

    def _finish_ports(self) -> List[Port]:
        if self.nonansi_names:
            declared = {p["name"]: p for p in self.ports}
            missing = [n for n in self.nonansi_names if n not in declared]
            if missing:
                raise UnbalancedDelimiters(f"ports without a direction declaration: {', '.join(missing)}")
            self.ports = [declared[n] for n in self.nonansi_names]

        clock = self.clock_name or next(
            (p["name"] for p in self.ports if p["name"].lower() in CLOCK_NAMES), None)
        reset = self.reset_name or next(
            (p["name"] for p in self.ports if p["name"].lower() in RESET_NAMES), None)
        ports = []
        for p in self.ports:
            width, range_text = _width_of(p["dims"], self.text)
            if not p["dims"] and p["data_type"] not in DATA_TYPES:
                width = f"$bits({p['data_type']})"
            ports.append(Port(
                name=p["name"],
                direction=p["direction"],
                width=width,
                data_type=p["data_type"],
                range_text=range_text,
                is_clock=p["name"] == clock,
                is_reset=p["name"] == reset,
                active_low=p["name"] == reset and p["name"].endswith("_n"),
            ))
        return ports

    # -=-=-=-=-=- BODY -=-=-=-=-=- #

    def _walk(self, i: int, end: int, gen_depth: int) -> None:
        while i < end:
            i = self._item(i, end, gen_depth)

    def _item(self, i: int, end: int, gen_depth: int) -> int:
        tok = self.tok
        t = tok[i]
        word = t.text
        nxt = tok[i + 1].text if i + 1 < end else ""

        if word in DIRECTIONS:
            return self._body_port(i)
        if word in ("parameter", "localparam"):
            return self._param_decl(i)
        if word == "typedef":
            return self._typedef(i)
        if word == "genvar":
            j = self._skip_to_semicolon(i)
            self.genvars.extend(x.text for x in tok[i + 1:j] if x.is_ident)
            return j
        if word in ("generate", "endgenerate", ";"):
            return i + 1
        if word == "for":
            return self._generate_for(i, end, gen_depth)
        if word == "if":
            return self._generate_if(i, end, gen_depth)
        if word == "begin":
            close = match_close(tok, i, "begin", "end")
            self._walk(self._skip_label(i + 1), close, gen_depth)
            return self._skip_label(close + 1)
        if word in PROCEDURAL:
            return self._skip_statement(i + 1)
        if word in ("function", "task"):
            return self._skip_label(match_close(tok, i, word, "end" + word) + 1)
        if word in ("case", "casez", "casex"):
            return match_close(tok, i, word, "endcase") + 1
        if word in ("property", "sequence", "clocking", "covergroup", "checker"):
            closer = {"covergroup": "endgroup"}.get(word, "end" + word)
            return self._skip_label(match_close(tok, i, word, closer) + 1)
        if word in DATA_TYPES or word in self.user_types or word in self.enum_types:
            return self._data_decl(i, gen_depth)
        if t.is_ident and (nxt == "::" or tok[i + 1].is_ident or nxt == "["):
            # `pkg::type_t name;` / `type_t name;` declare; `mod inst (...)` instantiates.
            if self._looks_like_declaration(i, end):
                return self._data_decl(i, gen_depth)
        return self._skip_to_semicolon(i)

    def _looks_like_declaration(self, i: int, end: int) -> bool:
        tok = self.tok
        j = i + 1
        while j < end and tok[j].text == "::":
            j += 2
        while j < end and tok[j].text == "[":
            j = match_paren(tok, j) + 1
        if j >= end or not tok[j].is_ident:
            return False
        follow = tok[j + 1].text if j + 1 < end else ";"
        return follow in (";", ",", "[", "=")

    def _skip_label(self, i: int) -> int:
        if i + 1 < len(self.tok) and self.tok[i].text == ":" and self.tok[i + 1].is_ident:
            return i + 2
        return i

    def _skip_to_semicolon(self, i: int) -> int:
        tok = self.tok
        depth = 0
        while i < len(tok):
            text = tok[i].text
            if text in ("(", "[", "{", "'{"):
                depth += 1
            elif text in (")", "]", "}"):
                depth -= 1
            elif text == ";" and depth <= 0:
                return i + 1
            i += 1
        return i

    def _skip_statement(self, i: int) -> int:
        tok = self.tok
        if i >= len(tok):
            return i
        word = tok[i].text
        if word == "@":
            if tok[i + 1].text == "(":
                return self._skip_statement(match_paren(tok, i + 1) + 1)
            return self._skip_statement(i + 2)
        if word == "#":
            j = i + 1
            j = match_paren(tok, j) + 1 if tok[j].text == "(" else j + 1
            return self._skip_statement(j)
        if word == "begin":
            return self._skip_label(match_close(tok, i, "begin", "end") + 1)
        if word == "fork":
            return self._skip_label(match_close(tok, i, "fork", ("join", "join_any", "join_none")) + 1)
        if word in ("unique", "unique0", "priority"):
            return self._skip_statement(i + 1)
        if word in ("case", "casez", "casex", "randcase"):
            return match_close(tok, i, word, "endcase") + 1
        if word == "if":
            j = self._skip_statement(match_paren(tok, i + 1) + 1)
            if j < len(tok) and tok[j].text == "else":
                j = self._skip_statement(j + 1)
            return j
        if word in ("for", "while", "repeat", "foreach"):
            return self._skip_statement(match_paren(tok, i + 1) + 1)
        if word in ("forever", "do"):
            return self._skip_statement(i + 1)
        return self._skip_to_semicolon(i)

    def _body_port(self, i: int) -> int:
        j = self._skip_to_semicolon(i)
        previous = {"direction": Direction(self.tok[i].text), "data_type": "logic", "dims": []}
        for chunk in split_top_level(self.tok[i:j - 1]):
            port = self._declarator(chunk, previous)
            if port:
                previous = port
                self._add_port(port)
        return j

    def _param_decl(self, i: int) -> int:
        j = self._skip_to_semicolon(i)
        target = self.parameters if self.tok[i].text == "parameter" else self.localparams
        chunks = split_top_level(self.tok[i + 1:j - 1])
        # Only the first chunk carries the type; later ones are bare `NAME = value`.
        for chunk in chunks:
            self._parameter_chunk(chunk, target)
        return j

    def _typedef(self, i: int) -> int:
        tok = self.tok
        j = self._skip_to_semicolon(i)
        body = tok[i + 1:j - 1]
        if not body:
            return j
        type_name = body[-1].text
        brace = next((k for k, t in enumerate(body) if t.text == "{"), None)
        if body[0].text == "enum" and brace is not None:
            close = match_paren(body, brace)
            self.enum_types[type_name] = self._enum_members(body[brace + 1:close])
        else:
            self.user_types.add(type_name)
        return j

    def _enum_members(self, tokens: List[Token]) -> List[str]:
        members = []
        for chunk in split_top_level(tokens):
            if chunk and chunk[0].is_ident:
                members.append(chunk[0].text)
        return members

    def _data_decl(self, i: int, gen_depth: int) -> int:
        tok = self.tok
        j = self._skip_to_semicolon(i)
        stmt = tok[i:j - 1]
        k = 0
        type_tokens: List[Token] = []
        dims: List[List[Token]] = []
        # type part: keywords, user type (with pkg::), enum body, packed dims
        while k < len(stmt):
            t = stmt[k]
            if t.text == "enum":
                brace = next(x for x in range(k, len(stmt)) if stmt[x].text == "{")
                close = match_paren(stmt, brace)
                self.enum_types[f"anon_{len(self.enum_types)}"] = self._enum_members(stmt[brace + 1:close])
                type_tokens.extend(stmt[k:brace])
                k = close + 1
                continue
            if t.text in ("struct", "union"):
                brace = next(x for x in range(k, len(stmt)) if stmt[x].text == "{")
                type_tokens.extend(stmt[k:brace])
                k = match_paren(stmt, brace) + 1
                continue
            if t.text == "[":
                close = match_paren(stmt, k)
                dims.append(stmt[k:close + 1])
                k = close + 1
                continue
            if t.text in DATA_TYPES or t.text in ("packed",):
                type_tokens.append(t)
                k += 1
                continue
            if t.is_ident and k + 1 < len(stmt) and stmt[k + 1].text == "::":
                type_tokens.extend(stmt[k:k + 3])
                k += 3
                continue
            if t.is_ident and not type_tokens and k + 1 < len(stmt) and (
                    stmt[k + 1].is_ident or stmt[k + 1].text == "["):
                type_tokens.append(t)
                k += 1
                continue
            break

        data_type = source_slice(self.text, [t for t in type_tokens
                                             if t.text not in ("signed", "unsigned", "packed")]) or "logic"
        width, _ = _width_of(dims, self.text)
        if not dims and type_tokens and not any(t.text in DATA_TYPES for t in type_tokens):
            width = f"$bits({data_type})"
        port_names = {p["name"] for p in self.ports} | set(self.nonansi_names)

        for chunk in split_top_level(stmt[k:]):
            eq = next((x for x, t in enumerate(chunk) if t.text == "="), len(chunk))
            decl = chunk[:eq]
            if not decl or not decl[0].is_ident:
                continue
            name = decl[0].text
            unpacked = sum(1 for t in decl[1:] if t.text == "[")
            if name in port_names:
                continue
            if name in self.internals:
                logger.debug(f"{name} declared again in another scope; keeping the first declaration")
                continue
            self.internals[name] = SignalDecl(
                name=name,
                width=width,
                kind=classify_signal(name, self.suffixes),
                array_depth=unpacked + gen_depth,
                data_type=data_type,
            )
        return j

    def _generate_for(self, i: int, end: int, gen_depth: int) -> int:
        tok = self.tok
        close = match_paren(tok, i + 1)
        header = tok[i + 2:close]
        if header and header[0].text == "genvar" and len(header) > 1:
            self.genvars.append(header[1].text)
        return self._branch(close + 1, end, gen_depth + 1)

    def _generate_if(self, i: int, end: int, gen_depth: int) -> int:
        tok = self.tok
        close = match_paren(tok, i + 1)
        j = self._branch(close + 1, end, gen_depth)
        if j < end and tok[j].text == "else":
            j = self._branch(j + 1, end, gen_depth)
        return j

    def _branch(self, i: int, end: int, gen_depth: int) -> int:
        if i < end and self.tok[i].text == "begin":
            close = match_close(self.tok, i, "begin", "end")
            self._walk(self._skip_label(i + 1), close, gen_depth)
            return self._skip_label(close + 1)
        return self._item(i, end, gen_depth)


def parse_module(src: Union[SourceFile, str],
                 register_suffixes: Sequence[str] = DEFAULT_REGISTER_SUFFIXES,
                 clock: Optional[str] = None,
                 reset: Optional[str] = None) -> RtlModule:
    """Parse the single module in `src` into an RtlModule."""
    if isinstance(src, str):
        src = SourceFile.from_text(src)
    logger.debug(f"Parsing module from {src.path} ({src.line_count} lines)")
    try:
        module = _ModuleParser(src.text, src.path, register_suffixes, clock, reset).parse()
        logger.debug(f"Module {module.name}: {len(module.ports)} ports, {len(module.internals)} internals")
        return module
    except (IndexError, StopIteration, ValueError) as e:
        if isinstance(e, (NoModuleFound, MultipleModules, UnbalancedDelimiters,
                          IncludeNotSupported, DuplicateDeclaration)):
            raise
        logger.error(f"Error parsing {src.path}: {str(e)}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        raise UnbalancedDelimiters(f"{src.path}: cannot parse module structure ({e})") from e
