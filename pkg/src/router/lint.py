from fastapi import APIRouter, Depends, HTTPException, status
from pydantic import BaseModel
from pathlib import Path
from typing import List, Optional
import logging
import os

from ..errors import SvaForgeError
from ..frontend import parse_module
from ..prompter import RULES_DIR
from ..rulebook import RuleSet, load_rules
from ..sva import LintFinding, errors_of, lint, parse_batch

# Configure logging
logger = logging.getLogger(__name__)

# Router
router = APIRouter(prefix="/v1", tags=["lint"])


class LintRequest(BaseModel):
    sva: str
    rtl: Optional[str] = None
    enable: List[str] = []
    disable: List[str] = []


class LintResponse(BaseModel):
    assertions: List[str]
    findings: List[LintFinding]
    errors: int
    residue: str


def get_rules() -> RuleSet:
    return load_rules(Path(os.getenv("SVA_FORGE_RULES", RULES_DIR / "sva_gen.rules")))


@router.post("/lint", response_model=LintResponse)
def lint_batch(request: LintRequest, rules: RuleSet = Depends(get_rules)):
    """Stateless: parse and lint the posted assertions, optionally against posted RTL."""
    try:
        module = parse_module(request.rtl) if request.rtl else None
        batch = parse_batch(request.sva, module)
        findings = lint(batch, module, rules, enable=request.enable, disable=request.disable)
    except SvaForgeError as e:
        logger.error(f"Lint request rejected: {str(e)}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))

    logger.debug(f"Linted {len(batch)} assertions: {len(findings)} finding(s)")
    return LintResponse(assertions=batch.names, findings=findings, errors=len(errors_of(findings)),
                        residue=batch.unparsed_residue)
