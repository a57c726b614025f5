"""Prompt composition under a token budget."""
from typing import Optional
import logging

from ..errors import (
    EmptyRuleSet, EmptySpecification, FrontendError, MalformedInterface, OverBudget,
)
from ..frontend import RtlModule, detect_fsm, estimate_tokens, parse_module, strip_comments
from ..rulebook import Category, RuleSet, render
from .models import Budget, PromptBundle, PromptKind, join_sections
from .templates import ANNOTATION_PREAMBLE, RTL_PREAMBLE, SVA_PREAMBLE, render_preamble

# Configure logging
logger = logging.getLogger(__name__)

_NON_STRATEGY = [c for c in Category if c != Category.STRAT]


def _estimate(preamble: str, rules_text: str, payload: str, sva: Optional[str] = None) -> int:
    return estimate_tokens(join_sections(preamble, rules_text, payload, sva))


def compose_sva_prompt(module: RtlModule, rs: RuleSet, budget: Budget = Budget(),
                       strip: bool = False, fsm_strategy: bool = False,
                       preamble_template=SVA_PREAMBLE) -> PromptBundle:
    """Compose the SVA-generation prompt; comments are stripped only under budget pressure."""
    fsm = detect_fsm(module) if fsm_strategy else None
    categories = list(Category) if fsm_strategy else _NON_STRATEGY
    preamble = render_preamble(preamble_template, module_name=module.name, fsm=fsm)
    rules_text = render(rs, categories)

    payload = strip_comments(module.source_text) if strip else module.source_text
    stripped = strip
    estimate = _estimate(preamble, rules_text, payload)
    if estimate > budget.input_limit and not stripped:
        logger.debug(f"SVA prompt for {module.name} is {estimate} tokens; stripping comments")
        payload = strip_comments(module.source_text)
        stripped = True
        estimate = _estimate(preamble, rules_text, payload)
    if estimate > budget.input_limit:
        raise OverBudget(estimate - budget.input_limit)

    logger.debug(f"SVA prompt for {module.name}: {estimate} tokens (stripped={stripped})")
    return PromptBundle(kind=PromptKind.SvaGen, preamble=preamble, rules_text=rules_text,
                        payload=payload, stripped=stripped)


def compose_annotation_prompt(module: RtlModule, annotation_rules: RuleSet, budget: Budget = Budget(),
                              preamble_template=ANNOTATION_PREAMBLE) -> PromptBundle:
    if not len(annotation_rules):
        raise EmptyRuleSet("annotation generation needs at least one rule")
    preamble = render_preamble(preamble_template, module_name=module.name, ports=module.port_names)
    rules_text = render(annotation_rules)

    # Annotations concern the interface, so the header alone is the last resort.
    candidates = [
        (module.source_text, False),
        (strip_comments(module.source_text), True),
        (strip_comments(module.header_text), True),
    ]
    estimate = 0
    for payload, stripped in candidates:
        estimate = _estimate(preamble, rules_text, payload)
        if estimate <= budget.input_limit:
            logger.debug(f"Annotation prompt for {module.name}: {estimate} tokens (stripped={stripped})")
            return PromptBundle(kind=PromptKind.AnnotationGen, preamble=preamble, rules_text=rules_text,
                                payload=payload, stripped=stripped)
    raise OverBudget(estimate - budget.input_limit)


def parse_interface(interface: str) -> RtlModule:
    """Parse a bare module header (`module m (...);`), closing it if needed."""
    text = interface.strip()
    if not text:
        raise MalformedInterface("the module interface is empty")
    if "endmodule" not in text:
        text += "\nendmodule"
    try:
        return parse_module(text)
    except FrontendError as e:
        raise MalformedInterface(f"the module interface does not parse: {e}") from e


def compose_rtl_prompt(spec: str, interface: str, sva: Optional[str] = None,
                       budget: Budget = Budget(), rs: Optional[RuleSet] = None,
                       preamble_template=RTL_PREAMBLE) -> PromptBundle:
    """Compose the RTL-generation prompt. Previous RTL is never an input here."""
    if not spec or not spec.strip():
        raise EmptySpecification("the design specification is empty")
    header = parse_interface(interface)
    preamble = render_preamble(preamble_template, module_name=header.name, with_sva=bool(sva))
    rules_text = render(rs) if rs is not None else ""
    payload = spec.strip() + "\n\n" + interface.strip()
    appended = sva.strip() if sva and sva.strip() else None

    estimate = _estimate(preamble, rules_text, payload, appended)
    if estimate > budget.input_limit:
        raise OverBudget(estimate - budget.input_limit)
    logger.debug(f"RTL prompt for {header.name}: {estimate} tokens (sva={'yes' if appended else 'no'})")
    return PromptBundle(kind=PromptKind.RtlGen, preamble=preamble, rules_text=rules_text,
                        payload=payload, appended_sva=appended)
