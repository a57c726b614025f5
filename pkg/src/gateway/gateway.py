from typing import Callable, Optional
import logging
import time
import traceback

from ..errors import ContextOverflow, GatewayError
from ..prompter import PromptBundle
from .ledger import CostLedger
from .models import Completion, ProviderConfig
from .providers import HttpProvider, MockProvider, Provider

# Configure logging
logger = logging.getLogger(__name__)

BACKOFF_SECONDS = 1.0


class LlmGateway:
    def __init__(self, cfg: ProviderConfig, provider: Optional[Provider] = None,
                 ledger: Optional[CostLedger] = None, sleep: Callable[[float], None] = time.sleep):
        self.cfg = cfg
        self.provider = provider or HttpProvider()
        self.ledger = ledger if ledger is not None else CostLedger()
        self._sleep = sleep

    @property
    def is_mock(self) -> bool:
        return isinstance(self.provider, MockProvider)

    def complete(self, bundle: PromptBundle) -> Completion:
        if bundle.token_estimate > self.cfg.context_limit:
            raise ContextOverflow(
                f"prompt of {bundle.token_estimate} tokens exceeds {self.cfg.name} context of "
                f"{self.cfg.context_limit}")

        attempt = 0
        while True:
            try:
                logger.debug(f"Sending {bundle.kind.value} prompt ({bundle.token_estimate} tokens) "
                             f"to {self.cfg.name}, attempt {attempt + 1}")
                completion = self.provider.send(bundle.text, self.cfg)
                break
            except GatewayError as e:
                if not e.retryable or attempt >= self.cfg.max_retries:
                    logger.error(f"Completion failed: {str(e)}")
                    raise
                delay = BACKOFF_SECONDS * (2 ** attempt)
                logger.warning(f"{type(e).__name__} from {self.cfg.name}; retrying in {delay}s")
                self._sleep(delay)
                attempt += 1
            except Exception as e:
                logger.error(f"Unexpected error from provider {self.cfg.name}: {str(e)}")
                logger.error(f"Traceback: {traceback.format_exc()}")
                raise

        self.ledger.record_completion(completion, self.cfg.usd_per_1k_tokens)
        return completion


def complete(bundle: PromptBundle, cfg: ProviderConfig, provider: Optional[Provider] = None,
             ledger: Optional[CostLedger] = None) -> Completion:
    return LlmGateway(cfg, provider, ledger).complete(bundle)
