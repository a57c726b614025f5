"""Append-only JSONL ledger of loop iterations."""
from pathlib import Path
from typing import List, Union
import json
import logging
import threading

from pydantic import ValidationError

from ..errors import CorruptLog
from .models import IterationRecord

# Configure logging
logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
HEADER = {"schema": SCHEMA_VERSION}


class Booklog:
    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.RLock()

    def records(self) -> List[IterationRecord]:
        if not self.path.exists():
            return []
        lines = [l for l in self.path.read_text(encoding="utf-8").splitlines() if l.strip()]
        if not lines:
            return []
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as e:
            raise CorruptLog(f"{self.path}: unreadable header") from e
        if header != HEADER:
            raise CorruptLog(f"{self.path}: expected header {HEADER}, found {header}")

        records = []
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                record = IterationRecord.model_validate_json(line)
            except ValidationError as e:
                raise CorruptLog(f"{self.path}:{lineno}: {e.errors()[0]['msg']}") from e
            if records and record.index <= records[-1].index:
                raise CorruptLog(f"{self.path}:{lineno}: index {record.index} after {records[-1].index}")
            records.append(record)
        return records

    def next_index(self) -> int:
        records = self.records()
        return records[-1].index + 1 if records else 1

    def append(self, record: IterationRecord) -> IterationRecord:
        with self._lock:
            existing = self.records()
            if existing and record.index <= existing[-1].index:
                raise CorruptLog(f"record index {record.index} does not follow {existing[-1].index}")
            self.path.parent.mkdir(parents=True, exist_ok=True)
            needs_header = not self.path.exists() or self.path.stat().st_size == 0
            with self.path.open("a", encoding="utf-8") as fh:
                if needs_header:
                    fh.write(json.dumps(HEADER) + "\n")
                fh.write(record.model_dump_json() + "\n")
        logger.debug(f"Booklog {self.path}: appended record {record.index} ({record.flow.value})")
        return record

    def add(self, **fields) -> IterationRecord:
        """Append a record at the next index."""
        with self._lock:
            return self.append(IterationRecord(index=self.next_index(), **fields))


# -=-=-=-=-=- EXPORT -=-=-=-=-=- #

TABLE_COLUMNS = ("T", "Compile", "#Prop", "#Fail", "Issues")


def _row(record: IterationRecord) -> List[str]:
    n_prop = str(record.batch_stats.n_assertions) if record.batch_stats else "-"
    if record.fpv_stats is None:
        compile_cell, n_fail = "-", "-"
    elif record.fpv_stats.compiled:
        compile_cell, n_fail = "✓", str(record.fpv_stats.n_failing)
    else:
        compile_cell, n_fail = "✗", "-"
    issues = record.error or ", ".join(record.lint_categories) or record.notes
    if record.fpv_stats and record.fpv_stats.compiled and record.fpv_stats.n_failing == 0 \
            and record.fpv_stats.n_proven and not issues:
        issues = "Full Proof"
    return [f"T{record.index}", compile_cell, n_prop, n_fail, issues]


def export_table(records: List[IterationRecord]) -> str:
    rows = [list(TABLE_COLUMNS)] + [_row(r) for r in records]
    widths = [max(len(row[c]) for row in rows) for c in range(len(TABLE_COLUMNS))]
    lines = []
    for n, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def export_json(records: List[IterationRecord]) -> str:
    return json.dumps([r.model_dump(mode="json") for r in records], indent=2)
