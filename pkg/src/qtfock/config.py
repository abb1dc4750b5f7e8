"""Enumeration guards.

Defaults can be overridden per process with the environment variables
``QTFOCK_MAX_PAIRING_N``, ``QTFOCK_MAX_PERM_N`` and ``QTFOCK_MAX_GRAM_WORK``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ResourceLimitError


@dataclass(frozen=True)
class Limits:
    max_pairing_n: int = 10
    max_perm_n: int = 8
    max_gram_work: int = 50_000_000


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ResourceLimitError(f"{name} must be an integer, got {raw!r}") from None


def get_limits() -> Limits:
    base = Limits()
    return Limits(
        max_pairing_n=_env_int("QTFOCK_MAX_PAIRING_N", base.max_pairing_n),
        max_perm_n=_env_int("QTFOCK_MAX_PERM_N", base.max_perm_n),
        max_gram_work=_env_int("QTFOCK_MAX_GRAM_WORK", base.max_gram_work),
    )


def check_limit(value: int, limit: int, what: str) -> None:
    if value > limit:
        raise ResourceLimitError(
            f"{what}: requested {value} exceeds the configured limit {limit}"
        )
