from .coverage import (
    coverage_from_dict, coverage_ratio, coverage_series, ingest_coverage, load_report, report_path,
    save_report,
)
from .engines import Engine, ExternalEngine, MockEngine, parse_mock_script, run
from .logparse import parse_engine_log
from .models import CoverageDelta, CoverageReport, FpvReport, ProofStatus

__all__ = [
    "CoverageDelta",
    "CoverageReport",
    "Engine",
    "ExternalEngine",
    "FpvReport",
    "MockEngine",
    "ProofStatus",
    "coverage_from_dict",
    "coverage_ratio",
    "coverage_series",
    "ingest_coverage",
    "load_report",
    "parse_engine_log",
    "parse_mock_script",
    "report_path",
    "run",
    "save_report",
]
