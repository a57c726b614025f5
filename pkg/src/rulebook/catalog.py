"""Builtin rule catalog for SVA generation."""
from typing import List, Mapping, Optional
import logging

from ..errors import UnknownLintKey
from .models import Category, Rule, RuleSet

# Configure logging
logger = logging.getLogger(__name__)

BUILTIN_VERSION = 1

# (id, category, lint_key, text). Order is the prompt order.
_BUILTIN = [
    ("sy_no_property", Category.SY, "no_property_decl",
     "DO NOT declare properties; DECLARE assertions named as__<NAME>: assert property (<EXPRESSION>)."),
    ("sy_name_suffix", Category.SY, "bad_name_suffix",
     "DO NOT use [] at the end of assertion NAME. Do not add @(posedge clk) to EXPRESSION."),
    ("sy_no_foreach", Category.SY, "no_foreach",
     "DO NOT use foreach loops in assertions, use generate for."),
    ("in_internal_def", Category.IN, "unknown_identifier",
     "Internal signals are those NOT present in the interface. Internal signals are declared within the module."),
    ("in_prefix", Category.IN, "unprefixed_internal",
     "Referencing internal signals in the property file ALWAYS requires prepending the name of the module "
     "before the signal name, e.g., name.<internal_signal>."),
    ("ws_and_reduce", Category.WS, None,
     "&bitarray means that ALL the bits are ONES."),
    ("ws_nand_reduce", Category.WS, "reduction_advisory",
     "!(&bitarray) means it's NOT TRUE that ALL the bits are ONES, i.e., SOME of the bits are ZEROS."),
    ("ws_nor_reduce", Category.WS, None,
     "!(|bitarray) means that NONE of the bits are ONES, i.e., ALL the bits are ZEROS."),
    ("wt_reg", Category.WT, None,
     "Signals ending in _reg are registers: the assigned value changes in the next cycle."),
    ("wt_wire", Category.WT, None,
     "Signals NOT ending in _reg are wires: the assigned value changes in the same cycle."),
    ("wt_same_cycle", Category.WT, None,
     "USE a same-cycle assertion (|->) to reason about behavior occurring in the same cycle."),
    ("wt_next_cycle", Category.WT, "register_update_same_cycle",
     "USE a next-cycle assertion (|=>) to reason about behavior occurring in the next cycle, for example, "
     "the updated value of a _reg."),
    ("wt_past_pre", Category.WT, "past_in_precondition",
     "DO NOT USE $past() in preconditions, ONLY in postconditions"),
    ("wt_past_same", Category.WT, "past_in_same_cycle_post",
     "DO NOT USE $past() on postcondition of same-cycle assertion"),
    ("wt_past_wire", Category.WT, "stale_read_in_next_cycle",
     "On the postcondition of next-cycle assertions (|=>), USE $past() to refer to the value of wires or a "
     "_reg on the cycle of the precondition."),
    ("wt_past_updated", Category.WT, None,
     "On the postcondition of next-cycle assertions (|=>), DO NOT USE $past() to refer to the updated value "
     "of _reg."),
    ("sy_no_clock", Category.SY, "no_clock_in_expr",
     "DO NOT write @(posedge clk) or disable iff inside an assertion; the testbench sets clock and reset."),
    ("sy_unique_names", Category.SY, "duplicate_name",
     "EVERY assertion NAME must be unique; DO NOT reuse a NAME."),
    ("sy_keyword", Category.SY, "wrong_keyword",
     "USE assert property for every assertion; DO NOT use always blocks, assume or cover."),
    ("sy_name_prefix", Category.SY, "bad_name_prefix",
     "Assertion NAMEs start with as__."),
    ("sy_constant_width", Category.SY, "zero_width_constant",
     "Sized constants have a width of at least one bit: write 1'b0, NEVER 0'b0."),
    ("ws_countones", Category.WS, None,
     "$countones(bitarray) is the NUMBER of bits that are ONES; compare it with a count, e.g., "
     "$countones(x) == 1."),
    ("gen_output_only", Category.GEN, None,
     "Output ONLY assertions and comments, no module declaration and no text outside comments."),
    ("gen_comment", Category.GEN, None,
     "Precede every assertion with a one-line comment stating the behavior it checks."),
    ("strat_fsm", Category.STRAT, None,
     "For every FSM, assert when it changes state and when it retains its state, and under which conditions."),
]


def builtin_rules() -> RuleSet:
    rules = [
        Rule(id=rule_id, category=category, text=text, lintable=key is not None, lint_key=key)
        for rule_id, category, key, text in _BUILTIN
    ]
    return RuleSet(rules=rules, version=BUILTIN_VERSION)


def verify_lint_backing(rs: RuleSet, checks: Mapping[str, Category]) -> None:
    """Every lintable rule must name an implemented check of the same category."""
    for rule in rs.rules:
        if not rule.lintable:
            continue
        category: Optional[Category] = checks.get(rule.lint_key)
        if category is None:
            raise UnknownLintKey(f"rule {rule.id} names unimplemented lint check {rule.lint_key}")
        if category != rule.category:
            raise UnknownLintKey(
                f"rule {rule.id} is {rule.category.value} but check {rule.lint_key} reports {category.value}")
    logger.debug(f"All {len(rs.lintable_keys())} lintable rules are backed by checks")


def render(rs: RuleSet, categories=None) -> str:
    """Numbered prompt text, one rule per line, in catalog order."""
    rules: List[Rule] = rs.filtered(categories)
    return "\n".join(f"{n}. {rule.text}" for n, rule in enumerate(rules, start=1))
