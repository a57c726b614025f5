"""Shared fixtures: paths into tests/fixtures and parsed versions of the common ones."""
from pathlib import Path

import pytest
from faker import Faker

from src.frontend import parse_module
from src.gateway import CostLedger, LlmGateway, MockProvider, ProviderConfig
from src.loop import Booklog
from src.rulebook import builtin_rules

FIXTURES = Path(__file__).parent / "fixtures"
RTL = FIXTURES / "rtl"
SVA = FIXTURES / "sva"
ISSUES = SVA / "issues"
MOCK_GEN = FIXTURES / "mock" / "gen"
ENGINE = FIXTURES / "engine"
LOGS = FIXTURES / "logs"
COVERAGE = FIXTURES / "coverage"
DESIGN = FIXTURES / "design"
CONFIG = FIXTURES / "config"


def read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


@pytest.fixture
def fake() -> Faker:
    Faker.seed(4321)
    return Faker()


@pytest.fixture
def fifo():
    return parse_module(read(RTL / "fifo.sv"))


@pytest.fixture
def ptw():
    return parse_module(read(RTL / "ptw.sv"))


@pytest.fixture
def rules():
    return builtin_rules()


@pytest.fixture
def booklog(tmp_path) -> Booklog:
    return Booklog(tmp_path / "booklog.jsonl")


@pytest.fixture
def make_gateway(tmp_path):
    """Build a gateway around a MockProvider that plays back the given texts."""
    def build(responses, usd_per_1k_tokens="0"):
        cfg = ProviderConfig(usd_per_1k_tokens=usd_per_1k_tokens)
        provider = MockProvider(list(responses))
        return LlmGateway(cfg, provider, CostLedger(tmp_path / "ledger.jsonl"), sleep=lambda s: None)
    return build
