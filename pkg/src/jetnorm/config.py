from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ConfigurationError

DEFAULT_MAX_COLUMNS = 20_000
DEFAULT_ORDER = 6
ENV_MAX_COLUMNS = "JETNORM_MAX_COLUMNS"


@dataclass(frozen=True)
class Settings:
    max_columns: int = DEFAULT_MAX_COLUMNS
    seed: int = 0

    @classmethod
    def from_env(cls, **overrides) -> "Settings":
        raw = os.environ.get(ENV_MAX_COLUMNS)
        kw = {}
        if raw:
            try:
                kw["max_columns"] = int(raw)
            except ValueError:
                raise ConfigurationError(f"{ENV_MAX_COLUMNS} must be an integer, got {raw!r}") from None
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


def max_columns(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    return Settings.from_env().max_columns
