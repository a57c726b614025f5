from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import List, Sequence, Union
import json
import logging

from pydantic import ValidationError

from ..errors import OutOfRange, SchemaError, ZeroBase
from .models import CoverageDelta, CoverageReport, FpvReport

# Configure logging
logger = logging.getLogger(__name__)

_CENT = Decimal("0.01")
_RANGE_ERRORS = {"greater_than_equal", "less_than_equal", "greater_than", "less_than"}


def coverage_from_dict(data: dict, source: str = "") -> CoverageReport:
    if not isinstance(data, dict):
        raise SchemaError("coverage report must be a JSON object")
    if source and "source" not in data:
        data = {**data, "source": source}
    try:
        return CoverageReport.model_validate(data)
    except ValidationError as e:
        kinds = {err["type"] for err in e.errors()}
        if kinds <= _RANGE_ERRORS:
            raise OutOfRange(f"coverage fractions must lie in [0, 1]: {e.errors()[0]['msg']}") from e
        raise SchemaError(f"coverage report does not match the schema: {e.errors()[0]['msg']}") from e


def ingest_coverage(path: Union[str, Path]) -> CoverageReport:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: not JSON ({e})") from e
    report = coverage_from_dict(data, source=path.name)
    logger.debug(f"Coverage from {path}: statement={report.statement} toggle={report.toggle}")
    return report


def _ratio(new: float, base: float) -> Decimal:
    return (Decimal(str(new)) / Decimal(str(base))).quantize(_CENT, rounding=ROUND_HALF_UP)


def coverage_ratio(base: CoverageReport, new: CoverageReport) -> CoverageDelta:
    if base.statement == 0 or base.toggle == 0:
        raise ZeroBase(f"base coverage {base.source or ''} has a zero fraction")
    return CoverageDelta(statement_ratio=_ratio(new.statement, base.statement),
                         toggle_ratio=_ratio(new.toggle, base.toggle))


def coverage_series(base: CoverageReport, reports: Sequence[CoverageReport]) -> List[CoverageDelta]:
    """Multiplier of every report over the same base, e.g. after 1, 3 and 6 batches."""
    return [coverage_ratio(base, r) for r in reports]


def report_path(out_dir: Union[str, Path], design: str) -> Path:
    return Path(out_dir) / "reports" / f"{design}.fpv.json"


def save_report(report: FpvReport, out_dir: Union[str, Path], design: str) -> Path:
    path = report_path(out_dir, design)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_report(path: Union[str, Path]) -> FpvReport:
    return FpvReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
