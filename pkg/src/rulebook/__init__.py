from .catalog import BUILTIN_VERSION, builtin_rules, render, verify_lint_backing
from .models import LINT_CATEGORIES, Category, Rule, RuleSet
from .store import dump_rules, load_rules, parse_rules, save_rules

__all__ = [
    "BUILTIN_VERSION",
    "Category",
    "LINT_CATEGORIES",
    "Rule",
    "RuleSet",
    "builtin_rules",
    "dump_rules",
    "load_rules",
    "parse_rules",
    "render",
    "save_rules",
    "verify_lint_backing",
]
