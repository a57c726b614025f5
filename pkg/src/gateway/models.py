from datetime import datetime
from decimal import Decimal
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

DEFAULT_API_KEY_ENV = "SVA_FORGE_API_KEY"


class ProviderConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = "mock"
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4"
    context_limit: int = Field(default=8192, gt=0)
    usd_per_1k_tokens: Decimal = Field(default=Decimal("0"), ge=0)
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = Field(default=120.0, gt=0)
    max_retries: int = Field(default=3, ge=0)
    temperature: Optional[float] = None


class Completion(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    prompt_tokens: int = Field(ge=0)
    completion_tokens: int = Field(ge=0)
    latency: float = Field(default=0.0, ge=0, description="milliseconds")
    provider: str

    @property
    def total_tokens(self) -> int:
        return self.prompt_tokens + self.completion_tokens


class LedgerEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    timestamp: datetime
    prompt_tokens: int = Field(ge=0)
    completion_tokens: int = Field(ge=0)
    usd: Decimal = Field(ge=0)
    provider: str = ""
