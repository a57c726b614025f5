"""Assertion-level lint checks for the recurring IN/SY/WT/WS issue classes."""
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set
import logging
import re

from ..frontend import RtlModule, SignalKind, tokenize
from ..frontend.lexer import split_top_level
from ..rulebook import Category, RuleSet
from .models import (
    ACCEPTED_PREFIXES, Assertion, AssertionBatch, AssertionKind, LintFinding, Severity, Side,
    SignalRef,
)

# Configure logging
logger = logging.getLogger(__name__)

_ZERO_WIDTH_RE = re.compile(r"^0+\s*'")


@dataclass
class LintContext:
    batch: AssertionBatch
    module: Optional[RtlModule]
    prior_names: Set[str]

    def is_register(self, name: str) -> bool:
        if self.module is None:
            return False
        decl = self.module.internal(name)
        return decl is not None and decl.kind == SignalKind.Register

    def is_wire_like(self, name: str) -> bool:
        """Input ports and internal wires: values that may change in the precondition cycle."""
        if self.module is None:
            return False
        port = self.module.port(name)
        if port is not None:
            return port.direction.value == "input" and not (port.is_clock or port.is_reset)
        decl = self.module.internal(name)
        return decl is not None and decl.kind == SignalKind.Wire


AssertionCheck = Callable[[Assertion, LintContext], List[LintFinding]]
BatchCheck = Callable[[LintContext], List[LintFinding]]


@dataclass(frozen=True)
class LintCheck:
    key: str
    category: Category
    severity: Severity
    default_enabled: bool
    needs_module: bool
    on_assertion: Optional[AssertionCheck] = None
    on_batch: Optional[BatchCheck] = None

    def finding(self, message: str, assertion: str = "", line: int = 0, column: int = 0) -> LintFinding:
        return LintFinding(lint_key=self.key, category=self.category, severity=self.severity,
                           message=message, assertion=assertion, span=(line, column))


CHECKS: Dict[str, LintCheck] = {}


def _check(key: str, category: Category, severity: Severity, default_enabled: bool = True,
           needs_module: bool = False, batch: bool = False):
    def register(fn):
        CHECKS[key] = LintCheck(key, category, severity, default_enabled, needs_module,
                                on_batch=fn if batch else None, on_assertion=None if batch else fn)
        return fn
    return register


def _finding(key: str, message: str, a: Assertion, ref: Optional[SignalRef] = None) -> LintFinding:
    line, column = (ref.line, ref.column) if ref else (a.line, a.column)
    return CHECKS[key].finding(message, a.name, line, column)


def _tokens(a: Assertion):
    return tokenize(a.raw)


def _offset(a: Assertion, tok) -> tuple:
    return a.line + tok.line - 1, (a.column + tok.column - 1) if tok.line == 1 else tok.column


# -=-=-=-=-=- IN: INTERNAL SIGNALS -=-=-=-=-=- #

@_check("unprefixed_internal", Category.IN, Severity.Error, needs_module=True)
def unprefixed_internal(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    internals = set(ctx.module.internal_names)
    return [
        _finding("unprefixed_internal",
                 f"internal signal {ref.name} must be referenced as {ctx.module.name}.{ref.name}", a, ref)
        for ref in a.signals if ref.prefix is None and ref.name in internals
    ]


@_check("unknown_identifier", Category.IN, Severity.Error, needs_module=True)
def unknown_identifier(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    m = ctx.module
    signals = set(m.port_names) | set(m.internal_names)
    values = set(m.constant_names) | set(m.genvars) | {lp.genvar for lp in a.loops}
    findings = []
    for ref in a.signals:
        if ref.prefix is None:
            if ref.name in signals or ref.name in values:
                continue
            findings.append(_finding("unknown_identifier", f"{ref.name} is not declared in {m.name}", a, ref))
            continue
        head = ref.prefix.split(".")[0]
        if head == m.name:
            if ref.name not in signals:
                findings.append(_finding("unknown_identifier", f"{m.name} has no signal {ref.name}", a, ref))
        elif head not in signals:
            # `struct_port.field` is fine; any other prefix names a missing scope.
            findings.append(_finding("unknown_identifier",
                                     f"{ref.prefix}.{ref.name}: {head} is not {m.name} nor one of its signals",
                                     a, ref))
    return findings


# -=-=-=-=-=- SY: SYNTAX -=-=-=-=-=- #

@_check("no_property_decl", Category.SY, Severity.Error, batch=True)
def no_property_decl(ctx: LintContext) -> List[LintFinding]:
    findings = []
    for fragment in ctx.batch.residue:
        toks = [t for t in tokenize(fragment.text)]
        if toks and toks[0].text == "property":
            name = toks[1].text if len(toks) > 1 else ""
            findings.append(CHECKS["no_property_decl"].finding(
                f"property {name} is declared; write it inline as as__<NAME>: assert property (...)",
                name, fragment.line, fragment.column))
    return findings


@_check("no_foreach", Category.SY, Severity.Error)
def no_foreach(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if any(lp.kind == "foreach" for lp in a.loops) or any(t.text == "foreach" for t in _tokens(a)):
        return [_finding("no_foreach", "foreach loops are not allowed around assertions; use generate for", a)]
    return []


@_check("no_clock_in_expr", Category.SY, Severity.Error)
def no_clock_in_expr(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    toks = _tokens(a)
    for k, tok in enumerate(toks):
        if tok.text == "@" or (tok.text == "disable" and k + 1 < len(toks) and toks[k + 1].text == "iff"):
            line, column = _offset(a, tok)
            return [CHECKS["no_clock_in_expr"].finding(
                "clocking or reset inside the assertion expression; the testbench provides them",
                a.name, line, column)]
    return []


@_check("bad_name_suffix", Category.SY, Severity.Error)
def bad_name_suffix(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if "[" in a.name:
        return [_finding("bad_name_suffix", f"assertion name {a.name} must not end in []", a)]
    return []


@_check("duplicate_name", Category.SY, Severity.Error, batch=True)
def duplicate_name(ctx: LintContext) -> List[LintFinding]:
    seen = set(ctx.prior_names)
    findings = []
    for a in ctx.batch.assertions:
        if a.name in seen:
            findings.append(_finding("duplicate_name", f"assertion name {a.name} is used more than once", a))
        seen.add(a.name)
    return findings


@_check("wrong_keyword", Category.SY, Severity.Error, batch=True)
def wrong_keyword(ctx: LintContext) -> List[LintFinding]:
    check = CHECKS["wrong_keyword"]
    findings = [
        _finding("wrong_keyword", f"{a.name} uses {a.keyword}; use assert property", a)
        for a in ctx.batch.assertions if a.keyword != "assert"
    ]
    for fragment in ctx.batch.residue:
        first = fragment.text.split(None, 1)[0] if fragment.text.strip() else ""
        first = re.split(r"\W", first, maxsplit=1)[0]
        if first in ("always", "always_ff", "always_comb", "initial"):
            findings.append(check.finding(f"{first} block in a property file; use assert property",
                                          "", fragment.line, fragment.column))
    return findings


@_check("bad_name_prefix", Category.SY, Severity.Warning)
def bad_name_prefix(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if not a.name.startswith(ACCEPTED_PREFIXES):
        return [_finding("bad_name_prefix", f"{a.name} should start with {' or '.join(ACCEPTED_PREFIXES)}", a)]
    return []


@_check("zero_width_constant", Category.SY, Severity.Warning)
def zero_width_constant(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    findings = []
    for tok in _tokens(a):
        if tok.kind == "number" and _ZERO_WIDTH_RE.match(tok.text):
            line, column = _offset(a, tok)
            findings.append(CHECKS["zero_width_constant"].finding(
                f"constant {tok.text} has zero width; use 1'b{tok.text[-1]}", a.name, line, column))
    return findings


# -=-=-=-=-=- WT: TIMING -=-=-=-=-=- #

def _side_tokens(a: Assertion, side: str):
    return tokenize(a.precondition if side == "pre" else a.postcondition)


@_check("past_in_precondition", Category.WT, Severity.Error)
def past_in_precondition(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if a.kind in (AssertionKind.SameCycle, AssertionKind.NextCycle) and any(
            t.text == "$past" for t in _side_tokens(a, "pre")):
        return [_finding("past_in_precondition", "$past() is used in the precondition", a)]
    return []


@_check("past_in_same_cycle_post", Category.WT, Severity.Error)
def past_in_same_cycle_post(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if a.kind == AssertionKind.SameCycle and any(t.text == "$past" for t in _side_tokens(a, "post")):
        return [_finding("past_in_same_cycle_post",
                         "$past() in the postcondition of a same-cycle (|->) assertion", a)]
    return []


@_check("stale_read_in_next_cycle", Category.WT, Severity.Warning, needs_module=True)
def stale_read_in_next_cycle(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if a.kind != AssertionKind.NextCycle:
        return []
    post = [r for r in a.signals if r.side == Side.Post]
    sampled = {r.name for r in post if r.under_past}
    findings = []
    reported = set()
    for ref in post:
        if ref.under_past or ref.name in reported:
            continue
        if ref.in_index and ctx.is_register(ref.name):
            reported.add(ref.name)
            findings.append(_finding(
                "stale_read_in_next_cycle",
                f"register {ref.name} indexes the postcondition without $past(); it may have been updated",
                a, ref))
        elif ctx.is_wire_like(ref.name) and ref.name not in sampled:
            reported.add(ref.name)
            findings.append(_finding(
                "stale_read_in_next_cycle",
                f"wire {ref.name} is read in the next cycle; use $past({ref.name}) for its precondition value",
                a, ref))
    return findings


@_check("register_update_same_cycle", Category.WT, Severity.Warning, needs_module=True)
def register_update_same_cycle(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    if a.kind != AssertionKind.SameCycle:
        return []
    sides = split_top_level(tokenize(a.postcondition), "==")
    if len(sides) != 2:
        return []
    # Sides are matched by identifier name, enough for the usual `reg == expr` shape.
    names = [{t.text for t in side if t.is_ident} for side in sides]
    for target, source in ((0, 1), (1, 0)):
        target_regs = sorted(n for n in names[target] if ctx.is_register(n))
        source_signals = [n for n in names[source] if ctx.module.port(n) or ctx.module.internal(n)]
        if target_regs and source_signals and not any(ctx.is_register(n) for n in source_signals):
            return [_finding(
                "register_update_same_cycle",
                f"register {target_regs[0]} is compared with its new value in the same cycle; use |=>", a)]
    return []


# -=-=-=-=-=- WS: SEMANTICS -=-=-=-=-=- #

@_check("reduction_advisory", Category.WS, Severity.Warning, default_enabled=False)
def reduction_advisory(a: Assertion, ctx: LintContext) -> List[LintFinding]:
    toks = [t.text for t in _tokens(a)]
    for k, text in enumerate(toks):
        if text in ("!", "~") and k + 1 < len(toks):
            nxt = toks[k + 1]
            if nxt in ("&", "|") or (nxt == "(" and k + 2 < len(toks) and toks[k + 2] in ("&", "|")):
                return [_finding("reduction_advisory",
                                 "negated reduction: check !& (some zero) versus !| (all zero)", a)]
        if text in ("~&", "~|"):
            return [_finding("reduction_advisory", f"{text} reduction: confirm the intended semantics", a)]
    return []


def check_categories() -> Dict[str, Category]:
    return {key: check.category for key, check in CHECKS.items()}


def lint(batch: AssertionBatch, module: Optional[RtlModule], rs: RuleSet,
         prior_names: Iterable[str] = (), enable: Sequence[str] = (),
         disable: Sequence[str] = ()) -> List[LintFinding]:
    """Run every check backed by a lintable rule in `rs`.

    Findings are ordered by (line, lint_key). Off-by-default checks run only
    when named in `enable`.
    """
    ctx = LintContext(batch=batch, module=module, prior_names=set(prior_names))
    active = []
    for key in rs.lintable_keys():
        check = CHECKS.get(key)
        if check is None or key in disable:
            continue
        if not check.default_enabled and key not in enable:
            continue
        if check.needs_module and module is None:
            continue
        active.append(check)

    findings: List[LintFinding] = []
    for check in active:
        if check.on_batch is not None:
            findings.extend(check.on_batch(ctx))
        else:
            for a in batch.assertions:
                findings.extend(check.on_assertion(a, ctx))
    findings.sort(key=lambda f: (f.span[0], f.lint_key, f.span[1], f.assertion))
    logger.debug(f"Lint of batch {batch.id}: {len(findings)} finding(s) from {len(active)} checks")
    return findings


def errors_of(findings: Iterable[LintFinding]) -> List[LintFinding]:
    return [f for f in findings if f.severity == Severity.Error]


def warnings_of(findings: Iterable[LintFinding]) -> List[LintFinding]:
    return [f for f in findings if f.severity == Severity.Warning]


def blocking_of(findings: Iterable[LintFinding]) -> List[LintFinding]:
    """Findings that fail a lint run: errors plus wrong-timing warnings."""
    return [f for f in findings if f.severity == Severity.Error or f.category == Category.WT]
