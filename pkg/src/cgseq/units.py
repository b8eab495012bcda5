"""Annualization conventions.

Internally everything runs in per-step units (one step = one tick interval,
T steps per trading day).  Annualized standard deviations scale per-step ones
by ``sqrt(252 * T)``; a daily quadratic variation annualizes by the factor
252.  All CLI outputs report annualized variances and say so in their header.
"""

from __future__ import annotations

import math

__all__ = [
    "TRADING_DAYS_PER_YEAR",
    "DEFAULT_STEPS_PER_DAY",
    "per_step_std",
    "annualized_std",
    "annualize_daily_var",
]

TRADING_DAYS_PER_YEAR = 252
DEFAULT_STEPS_PER_DAY = 23400


def per_step_std(annualized_var: float, steps_per_day: int) -> float:
    """Per-step standard deviation implied by an annualized variance."""
    if annualized_var < 0:
        raise ValueError("annualized variance must be non-negative")
    return math.sqrt(annualized_var / (TRADING_DAYS_PER_YEAR * steps_per_day))


def annualized_std(per_step: float, steps_per_day: int) -> float:
    """Annualized standard deviation of a per-step one."""
    return per_step * math.sqrt(TRADING_DAYS_PER_YEAR * steps_per_day)


def annualize_daily_var(daily_var: float) -> float:
    """Annualize a one-day variance (quadratic variation)."""
    return daily_var * TRADING_DAYS_PER_YEAR
