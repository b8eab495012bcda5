"""Steady-state filter variance and the cost of ignoring noise endogeneity.

With constant parameters the unit-root filtering variance converges to a
closed-form limit.  Comparing the backward-kernel variance of the full model
against the one computed with the endogeneity loading zeroed out yields a
quartic inequality whose sign determines the direction of the asymptotic
bias incurred by an estimator that ignores the noise/return correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._scalar import gamma_iterate

__all__ = [
    "SteadyParams",
    "gamma_star",
    "bias_sign",
    "BiasRow",
    "bias_region_table",
    "bias_crossovers",
    "gamma_star_iterated",
]


@dataclass(frozen=True)
class SteadyParams:
    """Constant-in-time scalar parameters: return scale ``b1``, endogenous
    noise loading ``B1t``, idiosyncratic noise scale ``B2t``.

    ``units`` is informational ("per-step" or "annualized"); all formulas
    here are scale-consistent so either convention works as long as the three
    values share it.
    """

    b1: float
    B1t: float
    B2t: float
    units: str = "per-step"

    def __post_init__(self):
        if not self.B2t > 0:
            raise ValueError("B2t must be positive")
        if self.units not in ("per-step", "annualized"):
            raise ValueError("units must be 'per-step' or 'annualized'")


def gamma_star(p: SteadyParams) -> float:
    """Limit of the unit-root filtering variance recursion.

    Closed form of the fixed point of

        g <- (g + b1^2) - (b1*(b1 + B1t) + g)^2 / ((b1 + B1t)^2 + B2t^2 + g).

    Note the ``|b1|`` factor: the limit is a variance, i.e. quadratic in the
    overall scale of ``(b1, B1t, B2t)``.
    """
    s = 2.0 * p.B1t + p.b1
    return 0.5 * (abs(p.b1) * math.sqrt(s * s + 4.0 * p.B2t**2) - p.b1 * s)


def _inequality_sides(b1: float, B1t: float, B2t: float) -> tuple[float, float]:
    root = math.sqrt(b1 * b1 + 4.0 * B2t * B2t)
    lhs = B1t**4 / b1**2 + 2.0 * B1t**3 / b1
    rhs = (root / b1) * B1t**2 + (b1 + root) * B1t
    return lhs, rhs


def bias_sign(p: SteadyParams, tol: float = 1e-14) -> str:
    """Direction of the asymptotic bias when endogeneity is ignored.

    Returns ``"negative"`` when the quartic side exceeds the quadratic side,
    ``"positive"`` for the reverse, ``"boundary"`` when they agree within
    ``tol`` relative to their magnitude.  Requires ``b1 != 0``.
    """
    if p.b1 == 0:
        raise ValueError("bias_sign requires b1 != 0")
    lhs, rhs = _inequality_sides(p.b1, p.B1t, p.B2t)
    scale = max(abs(lhs), abs(rhs))
    if abs(lhs - rhs) <= tol * scale or scale == 0.0:
        return "boundary"
    return "negative" if lhs > rhs else "positive"


class BiasRow(NamedTuple):
    B1t: float
    lhs: float
    rhs: float
    sign: str


def bias_region_table(b1: float, B2t: float, B1t_grid: np.ndarray) -> list[BiasRow]:
    """Evaluate both sides of the bias inequality over a grid of loadings."""
    grid = np.asarray(B1t_grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite")
    rows = []
    for v in grid:
        lhs, rhs = _inequality_sides(b1, float(v), B2t)
        rows.append(BiasRow(float(v), lhs, rhs, bias_sign(SteadyParams(b1, float(v), B2t))))
    return rows


def bias_crossovers(
    b1: float,
    B2t: float,
    lo: float,
    hi: float,
    n_grid: int = 4001,
    tol: float = 1e-10,
) -> list[float]:
    """Roots of lhs - rhs on [lo, hi]: grid scan for sign changes, then bisection."""

    def f(x: float) -> float:
        lhs, rhs = _inequality_sides(b1, x, B2t)
        return lhs - rhs

    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([f(x) for x in grid])
    roots: list[float] = []
    for i in range(n_grid - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
            continue
        if vals[i] * vals[i + 1] < 0.0:
            a, b = float(grid[i]), float(grid[i + 1])
            fa = vals[i]
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = f(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def gamma_star_iterated(p: SteadyParams, n_steps: int = 100_000, g0: float = 0.0) -> float:
    """Brute-force limit by iterating the variance recursion (cross-check oracle)."""
    return float(gamma_iterate(p.b1, p.B1t, p.B2t, n_steps, g0))
