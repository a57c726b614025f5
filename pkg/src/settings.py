"""Run settings: defaults, overridden by a `key|value` config file and the environment."""
from pathlib import Path
from typing import Dict, Optional, Tuple, Union
import logging

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError
from .forge import EngineOptions, FtOptions
from .frontend import DEFAULT_REGISTER_SUFFIXES
from .gateway import ProviderConfig
from .kvfile import read_pairs
from .loop import DEFAULT_MAX_ITERS, DEFAULT_PLATEAU_WINDOW
from .prompter import RULES_DIR, Budget

# Configure logging
logger = logging.getLogger(__name__)


class LoopOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(default=DEFAULT_MAX_ITERS, gt=0)
    plateau_window: int = Field(default=DEFAULT_PLATEAU_WINDOW, ge=2)
    batches: int = Field(default=1, gt=0)


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    provider: ProviderConfig = ProviderConfig()
    budget: Budget = Budget()
    engine: EngineOptions = EngineOptions()
    engine_cmd: str = "sby -f"
    loop: LoopOptions = LoopOptions()
    register_suffixes: Tuple[str, ...] = DEFAULT_REGISTER_SUFFIXES
    clock: Optional[str] = None
    reset: Optional[str] = None
    liveness_depth: int = Field(default=16, gt=0)
    rules_sva: Path = RULES_DIR / "sva_gen.rules"
    rules_annotation: Path = RULES_DIR / "annotation_gen.rules"
    rules_rtl: Path = RULES_DIR / "rtl_gen.rules"

    def ft_options(self, force: bool = False) -> FtOptions:
        return FtOptions(force=force, clock=self.clock, reset=self.reset,
                         liveness_depth=self.liveness_depth, engine=self.engine)


# config key -> (section, field); section None means a top-level Settings field
_KEYS: Dict[str, Tuple[Optional[str], str]] = {
    "provider.name": ("provider", "name"),
    "provider.endpoint": ("provider", "endpoint"),
    "provider.model": ("provider", "model"),
    "provider.context_limit": ("provider", "context_limit"),
    "provider.usd_per_1k_tokens": ("provider", "usd_per_1k_tokens"),
    "provider.api_key_env": ("provider", "api_key_env"),
    "provider.timeout": ("provider", "timeout"),
    "provider.max_retries": ("provider", "max_retries"),
    "provider.temperature": ("provider", "temperature"),
    "budget.context_limit": ("budget", "context_limit"),
    "budget.output_reserve": ("budget", "output_reserve"),
    "frontend.register_suffixes": (None, "register_suffixes"),
    "frontend.clock": (None, "clock"),
    "frontend.reset": (None, "reset"),
    "forge.liveness_depth": (None, "liveness_depth"),
    "engine.cmd": (None, "engine_cmd"),
    "engine.mode": ("engine", "mode"),
    "engine.depth": ("engine", "depth"),
    "engine.timeout": ("engine", "timeout"),
    "loop.max_iters": ("loop", "max_iters"),
    "loop.plateau_window": ("loop", "plateau_window"),
    "loop.batches": ("loop", "batches"),
    "rules.sva": (None, "rules_sva"),
    "rules.annotation": (None, "rules_annotation"),
    "rules.rtl": (None, "rules_rtl"),
}


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    load_dotenv()
    if path is None:
        logger.debug("No config file given, using defaults")
        return Settings()

    path = Path(path)
    data: Dict[str, object] = {}
    for lineno, key, value in read_pairs(path):
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        section, field = _KEYS[key]
        if field == "register_suffixes":
            value = tuple(s.strip() for s in value.split(",") if s.strip())
        elif field.startswith("rules_"):
            # Rule paths are relative to the config file.
            value = str((path.parent / value).resolve())
        if section is None:
            data[field] = value
        else:
            data.setdefault(section, {})[field] = value

    try:
        settings = Settings.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(p) for p in error["loc"])
        raise ConfigError(f"{path}: {where}: {error['msg']}") from e
    logger.debug(f"Loaded settings from {path}: provider={settings.provider.name}")
    return settings
