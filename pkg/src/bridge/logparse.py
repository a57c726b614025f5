"""Tolerant parser for formal-engine logs (SymbiYosys style plus plain status lines)."""
from typing import Dict, Iterable, List, Optional
import logging
import re

from .models import FpvReport, ProofStatus

# Configure logging
logger = logging.getLogger(__name__)

_STATUS_LINE = re.compile(r"^\s*(?:SBY.*?:\s*)?(PASS|FAIL|UNKNOWN|PROVEN|FAILED)\s*[:\s]\s*([A-Za-z_][\w$.\[\]]*)\s*$")
_ASSERT_FAILED = re.compile(r"Assert failed in .*?\(([A-Za-z_][\w$\[\].]*)\)")
_FAILED_ASSERTION = re.compile(r"failed assertion\s+([A-Za-z_][\w$\[\].]*)(?:.*?in step (\d+))?")
_TRACE = re.compile(r"(?:counterexample trace|Writing trace to \w+ file):\s*(\S+)")
_DONE = re.compile(r"DONE \((PASS|FAIL|UNKNOWN|ERROR|TIMEOUT)")
_STEP = re.compile(r"in step (\d+)")

_WORDS = {
    "PASS": ProofStatus.Proven, "PROVEN": ProofStatus.Proven,
    "FAIL": ProofStatus.Failing, "FAILED": ProofStatus.Failing,
    "UNKNOWN": ProofStatus.Unknown,
}


def _short(name: str) -> str:
    # Hierarchical names (`fifo.fifo_prop_i.as__x`) reduce to the assertion label.
    return name.rsplit(".", 1)[-1]


def parse_engine_log(text: str, assertion_names: Iterable[str] = (), engine: str = "sby",
                     runtime: float = 0.0) -> FpvReport:
    """Extract per-assertion statuses; an unreadable log yields compiled=False."""
    statuses: Dict[str, ProofStatus] = {}
    traces: Dict[str, List[str]] = {}
    steps: Dict[str, str] = {}
    last_failed: Optional[str] = None
    done: Optional[str] = None

    for line in text.splitlines():
        m = _STATUS_LINE.match(line)
        if m:
            name = _short(m.group(2))
            statuses[name] = _WORDS[m.group(1)]
            if statuses[name] == ProofStatus.Failing:
                last_failed = name
            continue
        for pattern in (_ASSERT_FAILED, _FAILED_ASSERTION):
            m = pattern.search(line)
            if m:
                last_failed = _short(m.group(1))
                statuses[last_failed] = ProofStatus.Failing
                step = _STEP.search(line)
                if step:
                    steps[last_failed] = step.group(1)
                break
        m = _TRACE.search(line)
        if m and last_failed:
            path = m.group(1)
            if path not in traces.setdefault(last_failed, []):
                traces[last_failed].append(path)
        m = _DONE.search(line)
        if m:
            done = m.group(1)

    names = list(assertion_names)
    if done == "ERROR" or (done is None and not statuses):
        logger.debug(f"Engine log not usable (done={done}, {len(statuses)} statuses)")
        return FpvReport(compiled=False, engine=engine, runtime=runtime)

    if names:
        foreign = sorted(set(statuses) - set(names))
        if foreign:
            logger.warning(f"Ignoring engine statuses for names outside the FT: {', '.join(foreign)}")
        statuses = {n: s for n, s in statuses.items() if n in names}

    if done == "PASS":
        # A passing run proves everything it did not name.
        for name in names:
            statuses.setdefault(name, ProofStatus.Proven)
    for name in names:
        statuses.setdefault(name, ProofStatus.Unknown)

    cex = {}
    for name, status in statuses.items():
        if status != ProofStatus.Failing:
            continue
        parts = [f"trace {p}" for p in traces.get(name, [])]
        if name in steps:
            parts.append(f"first failing step {steps[name]}")
        cex[name] = ", ".join(parts) or "counterexample found"
    return FpvReport(per_assertion=statuses, cex_summaries=cex, compiled=True, engine=engine, runtime=runtime)
