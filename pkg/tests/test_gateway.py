from decimal import Decimal

import httpx
import pytest

from src.errors import AuthError, ContextOverflow, RateLimited, ScriptExhausted, TransportError
from src.gateway import (
    DEFAULT_API_KEY_ENV, Completion, CostLedger, HttpProvider, LlmGateway, MockProvider, ProviderConfig,
    entry_cost, total_cost,
)
from src.prompter import PromptBundle, PromptKind

from conftest import MOCK_GEN


def bundle(payload: str = "Write assertions for this module.") -> PromptBundle:
    return PromptBundle(kind=PromptKind.SvaGen, payload=payload)


class FlakyProvider:
    """Raises the queued errors first, then answers."""

    name = "flaky"

    def __init__(self, errors):
        self.errors = list(errors)
        self.calls = 0

    def send(self, prompt: str, cfg: ProviderConfig) -> Completion:
        self.calls += 1
        if self.errors:
            raise self.errors.pop(0)
        return Completion(text="ok", prompt_tokens=10, completion_tokens=2, provider=self.name)


class TestMockProvider:

    def test_plays_back_in_order(self, make_gateway):
        gw = make_gateway(["first", "second"])
        assert gw.complete(bundle()).text == "first"
        assert gw.complete(bundle()).text == "second"
        assert gw.provider.prompts == [bundle().text, bundle().text]
        assert gw.is_mock

    def test_exhausted_script(self, make_gateway):
        gw = make_gateway(["only"])
        gw.complete(bundle())
        with pytest.raises(ScriptExhausted):
            gw.complete(bundle())

    def test_from_files(self):
        paths = sorted(MOCK_GEN.glob("*.txt"))
        provider = MockProvider.from_files(paths)
        first = provider.send("prompt", ProviderConfig())
        assert "transaction push" in first.text
        assert provider.calls == 1

    def test_records_estimated_tokens(self, make_gateway):
        gw = make_gateway(["abcdefgh"])
        completion = gw.complete(bundle("abcd"))
        assert completion.completion_tokens == 2
        assert completion.prompt_tokens == bundle("abcd").token_estimate
        assert len(gw.ledger) == 1


class TestLedger:

    def test_entry_cost(self):
        assert entry_cost(2000, 500, Decimal("0.03")) == Decimal("0.075")

    def test_persisted_and_reloaded(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        ledger = CostLedger(path)
        ledger.record(2000, 500, Decimal("0.03"), provider="mock")
        ledger.record(1000, 0, Decimal("0.03"), provider="mock")
        assert total_cost(ledger) == Decimal("0.105")

        again = CostLedger(path)
        assert len(again) == 2
        assert total_cost(again) == Decimal("0.105")
        assert again.entries[0].prompt_tokens == 2000

    def test_in_memory(self):
        ledger = CostLedger()
        ledger.record(10, 10, Decimal("0"))
        assert total_cost(ledger) == 0
        assert ledger.path is None

    def test_gateway_charges_configured_rate(self, make_gateway):
        gw = make_gateway(["x" * 2000], usd_per_1k_tokens="0.03")
        completion = gw.complete(bundle("y" * 8000))
        assert completion.total_tokens == 2500
        assert total_cost(gw.ledger) == Decimal("0.075")


class TestRetries:

    def gateway(self, provider, max_retries=3):
        sleeps = []
        gw = LlmGateway(ProviderConfig(max_retries=max_retries), provider, CostLedger(), sleep=sleeps.append)
        return gw, sleeps

    def test_backoff_doubles(self):
        provider = FlakyProvider([RateLimited("slow down"), TransportError("502")])
        gw, sleeps = self.gateway(provider)
        assert gw.complete(bundle()).text == "ok"
        assert sleeps == [1.0, 2.0]
        assert provider.calls == 3
        assert len(gw.ledger) == 1

    def test_gives_up_after_max_retries(self):
        provider = FlakyProvider([TransportError("down")] * 3)
        gw, sleeps = self.gateway(provider, max_retries=2)
        with pytest.raises(TransportError):
            gw.complete(bundle())
        assert sleeps == [1.0, 2.0]
        assert len(gw.ledger) == 0

    def test_auth_error_is_not_retried(self):
        provider = FlakyProvider([AuthError("bad key")])
        gw, sleeps = self.gateway(provider)
        with pytest.raises(AuthError):
            gw.complete(bundle())
        assert sleeps == []
        assert provider.calls == 1

    def test_context_overflow_before_sending(self):
        provider = FlakyProvider([])
        gw = LlmGateway(ProviderConfig(context_limit=5), provider, CostLedger())
        with pytest.raises(ContextOverflow):
            gw.complete(bundle("x" * 100))
        assert provider.calls == 0


class TestHttpProvider:

    def provider(self, handler) -> HttpProvider:
        return HttpProvider(httpx.Client(transport=httpx.MockTransport(handler)))

    def test_chat_completion(self, monkeypatch):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["auth"] = request.headers["Authorization"]
            seen["body"] = request.content
            return httpx.Response(200, json={
                "choices": [{"message": {"content": "as__x: assert property (a |-> b);"}}],
                "usage": {"prompt_tokens": 12, "completion_tokens": 7},
            })

        completion = self.provider(handler).send("hello", ProviderConfig(name="openai", temperature=0.2))
        assert completion.text.startswith("as__x")
        assert (completion.prompt_tokens, completion.completion_tokens) == (12, 7)
        assert completion.provider == "openai"
        assert seen["auth"] == "Bearer secret"
        assert b"hello" in seen["body"] and b"temperature" in seen["body"]

    def test_usage_falls_back_to_estimate(self, monkeypatch):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        provider = self.provider(lambda r: httpx.Response(200, json={"choices": [{"message": {"content": "abcd"}}]}))
        completion = provider.send("abcdefgh", ProviderConfig())
        assert (completion.prompt_tokens, completion.completion_tokens) == (2, 1)

    def test_missing_key(self, monkeypatch):
        monkeypatch.delenv(DEFAULT_API_KEY_ENV, raising=False)
        provider = self.provider(lambda r: httpx.Response(200, json={}))
        with pytest.raises(AuthError, match=DEFAULT_API_KEY_ENV):
            provider.send("hello", ProviderConfig())

    @pytest.mark.parametrize("status, error", [
        (401, AuthError),
        (403, AuthError),
        (429, RateLimited),
        (503, TransportError),
    ])
    def test_status_mapping(self, monkeypatch, status, error):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        provider = self.provider(lambda r: httpx.Response(status, text="nope"))
        with pytest.raises(error):
            provider.send("hello", ProviderConfig())

    def test_context_length_rejection(self, monkeypatch):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        provider = self.provider(lambda r: httpx.Response(400, text='{"error": "context_length_exceeded"}'))
        with pytest.raises(ContextOverflow):
            provider.send("hello", ProviderConfig())

    def test_garbled_body(self, monkeypatch):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        provider = self.provider(lambda r: httpx.Response(200, text="not json"))
        with pytest.raises(TransportError):
            provider.send("hello", ProviderConfig())

    def test_gateway_retries_http_failures(self, monkeypatch):
        monkeypatch.setenv(DEFAULT_API_KEY_ENV, "secret")
        statuses = iter([503, 200])

        def handler(request):
            status = next(statuses)
            if status != 200:
                return httpx.Response(status)
            return httpx.Response(200, json={"choices": [{"message": {"content": "done"}}]})

        sleeps = []
        gw = LlmGateway(ProviderConfig(), self.provider(handler), CostLedger(), sleep=sleeps.append)
        assert gw.complete(bundle()).text == "done"
        assert sleeps == [1.0]
