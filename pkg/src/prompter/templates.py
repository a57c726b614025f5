from pathlib import Path
from typing import Optional, Union
import logging

from jinja2 import StrictUndefined, Template

# Configure logging
logger = logging.getLogger(__name__)

RULES_DIR = Path(__file__).resolve().parents[2] / "rules"

SVA_PREAMBLE = "sva_gen.preamble"
ANNOTATION_PREAMBLE = "annotation_gen.preamble"
RTL_PREAMBLE = "rtl_gen.preamble"


def load_template(name_or_path: Union[str, Path], rules_dir: Optional[Path] = None) -> Template:
    path = Path(name_or_path)
    if not path.is_absolute() and not path.exists():
        path = (rules_dir or RULES_DIR) / path
    logger.debug(f"Loading prompt template {path}")
    return Template(path.read_text(encoding="utf-8"), undefined=StrictUndefined,
                    keep_trailing_newline=False)


def render_preamble(template: Union[str, Path, Template], **context) -> str:
    if not isinstance(template, Template):
        template = load_template(template)
    return template.render(**context).strip()
