"""
LoopK Configuration

Settings are read from the environment (with .env support):
- LOOPK_MAX_ITER: reflection cap for alcove folding (default: 10000)
- LOOPK_DEFAULT_Q_ORDER: q-order used when a command omits --q-order (default: 10)
- LOOPK_LOG_LEVEL: console log level for the CLI (default: WARNING)
- LOOPK_MAX_WEYL_ORDER: largest finite Weyl group enumerated by induction (default: 1024)
"""

import os
import logging
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from loopk.errors import InputError


# Load environment variables
load_dotenv()

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise InputError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Runtime settings"""
    max_iter: int = 10000
    default_q_order: int = 10
    log_level: str = "WARNING"
    max_weyl_order: int = 1024

    @classmethod
    def from_env(cls) -> "Settings":
        level = os.getenv("LOOPK_LOG_LEVEL", "WARNING").upper()
        if level not in _LOG_LEVELS:
            raise InputError(f"LOOPK_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}, got {level!r}")
        return cls(
            max_iter=_positive_int("LOOPK_MAX_ITER", 10000),
            default_q_order=_positive_int("LOOPK_DEFAULT_Q_ORDER", 10),
            log_level=level,
            max_weyl_order=_positive_int("LOOPK_MAX_WEYL_ORDER", 1024),
        )

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings from the environment, read once (call get_settings.cache_clear() to reload)"""
    return Settings.from_env()
