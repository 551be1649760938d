"""Run-wide defaults, overridable from the environment and the command line."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

SEED_ENV = "EXTFORM_SEED"


@dataclass(frozen=True)
class Settings:
    max_configs: int = 200_000
    brute_force_cap: int = 10**7
    max_pivots: int = 10**7
    seed: int = 0
    suite_max_vars: int = 8
    suite_max_domain: int = 3

    @classmethod
    def from_env(cls) -> "Settings":
        raw = os.environ.get(SEED_ENV, "").strip()
        if not raw:
            return cls()
        try:
            return cls(seed=int(raw))
        except ValueError:
            raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None

    def override(self, **changes: object) -> "Settings":
        """Return a copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 10
