from .gateway import BACKOFF_SECONDS, LlmGateway, complete
from .ledger import CostLedger, entry_cost, total_cost
from .models import DEFAULT_API_KEY_ENV, Completion, LedgerEntry, ProviderConfig
from .providers import HttpProvider, MockProvider, Provider, mock_provider

__all__ = [
    "BACKOFF_SECONDS",
    "Completion",
    "CostLedger",
    "DEFAULT_API_KEY_ENV",
    "HttpProvider",
    "LedgerEntry",
    "LlmGateway",
    "MockProvider",
    "Provider",
    "complete",
    "entry_cost",
    "mock_provider",
    "total_cost",
]
