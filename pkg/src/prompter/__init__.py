from .composer import compose_annotation_prompt, compose_rtl_prompt, compose_sva_prompt, parse_interface
from .models import Budget, PromptBundle, PromptKind
from .templates import RULES_DIR, load_template, render_preamble

__all__ = [
    "Budget",
    "PromptBundle",
    "PromptKind",
    "RULES_DIR",
    "compose_annotation_prompt",
    "compose_rtl_prompt",
    "compose_sva_prompt",
    "load_template",
    "parse_interface",
    "render_preamble",
]
