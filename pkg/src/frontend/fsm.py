from typing import List, Optional
import logging

from .lexer import Token, match_close, match_paren, tokenize
from .models import FsmInfo, RtlModule, SignalKind

# Configure logging
logger = logging.getLogger(__name__)

_CASE_WORDS = ("case", "casez", "casex", "unique", "unique0", "priority")
_LABEL_LEADS = (")", ";", "end", ",", "endcase", "begin")


def _case_labels(tokens: List[Token], start: int, stop: int, constants: set) -> List[str]:
    labels: List[str] = []
    depth = 0
    for j in range(start, stop):
        text = tokens[j].text
        if text in ("case", "casez", "casex"):
            depth += 1
        elif text == "endcase":
            depth -= 1
        elif depth == 0 and text in constants and j + 1 < stop:
            if tokens[j + 1].text in (":", ",") and tokens[j - 1].text in _LABEL_LEADS:
                if text not in labels:
                    labels.append(text)
    return labels


def detect_fsm(module: RtlModule) -> Optional[FsmInfo]:
    """Find a `case` over an internal register whose labels are named states."""
    tokens = tokenize(module.stripped_text)
    constants = set(module.enum_members) | {p.name for p in module.localparams}
    if not constants:
        return None

    for i, tok in enumerate(tokens):
        if tok.text not in ("case", "casez", "casex") or i + 1 >= len(tokens) or tokens[i + 1].text != "(":
            continue
        close = match_paren(tokens, i + 1)
        selector = tokens[i + 2:close]
        if len(selector) != 1:
            continue
        decl = module.internal(selector[0].text)
        if decl is None or decl.kind != SignalKind.Register:
            continue
        end = match_close(tokens, i, tok.text, "endcase")
        states = _case_labels(tokens, close + 1, end if end > 0 else len(tokens), constants)
        if not states:
            continue
        transitions = any(
            t.text in states and tokens[k - 1].text in ("=", "<=")
            for k, t in enumerate(tokens) if k > 0
        )
        logger.debug(f"FSM on {decl.name} in {module.name}: {states} (transitions={transitions})")
        return FsmInfo(state_signal=decl.name, states=states, transitions_detected=transitions)
    return None
