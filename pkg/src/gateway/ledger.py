"""Append-only token/cost ledger, optionally mirrored to a JSONL file."""
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import List, Optional, Union
import logging
import threading

from .models import Completion, LedgerEntry

# Configure logging
logger = logging.getLogger(__name__)

_THOUSAND = Decimal(1000)


def entry_cost(prompt_tokens: int, completion_tokens: int, usd_per_1k_tokens: Decimal) -> Decimal:
    return Decimal(prompt_tokens + completion_tokens) / _THOUSAND * Decimal(usd_per_1k_tokens)


class CostLedger:
    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._entries: List[LedgerEntry] = []
        if self.path and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._entries.append(LedgerEntry.model_validate_json(line))
            logger.debug(f"Loaded {len(self._entries)} ledger entries from {self.path}")

    @property
    def entries(self) -> List[LedgerEntry]:
        with self._lock:
            return list(self._entries)

    def record(self, prompt_tokens: int, completion_tokens: int, usd_per_1k_tokens: Decimal,
               provider: str = "", timestamp: Optional[datetime] = None) -> LedgerEntry:
        entry = LedgerEntry(
            timestamp=timestamp or datetime.now(timezone.utc),
            prompt_tokens=prompt_tokens,
            completion_tokens=completion_tokens,
            usd=entry_cost(prompt_tokens, completion_tokens, usd_per_1k_tokens),
            provider=provider,
        )
        with self._lock:
            self._entries.append(entry)
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(entry.model_dump_json() + "\n")
        logger.debug(f"Ledger entry: {entry.prompt_tokens}+{entry.completion_tokens} tokens, {entry.usd} USD")
        return entry

    def record_completion(self, completion: Completion, usd_per_1k_tokens: Decimal) -> LedgerEntry:
        return self.record(completion.prompt_tokens, completion.completion_tokens, usd_per_1k_tokens,
                           provider=completion.provider)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def total_cost(ledger: CostLedger) -> Decimal:
    return sum((e.usd for e in ledger.entries), Decimal(0))
