"""Work budgeting shared by the construction-heavy engines.

A budget exhaustion is always surfaced as an explicit BudgetError, never as
a (possibly wrong) verdict.  The default cap can be overridden with the
MPTA_BUDGET environment variable or the CLI --budget flag.
"""

from __future__ import annotations

import os

DEFAULT_BUDGET = 500_000


class BudgetError(RuntimeError):
    pass


def budget_from_env(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    raw = os.environ.get("MPTA_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise BudgetError(f"MPTA_BUDGET must be an integer, got {raw!r}")
    return DEFAULT_BUDGET


class Budget:
    """Counts abstract work units; raises once the cap is crossed."""

    def __init__(self, cap: int | None = None):
        self.cap = budget_from_env(cap)
        self.used = 0

    def spend(self, units: int = 1):
        self.used += units
        if self.used > self.cap:
            raise BudgetError(
                f"work budget exceeded ({self.used} > {self.cap}); "
                "raise MPTA_BUDGET or --budget to continue"
            )
