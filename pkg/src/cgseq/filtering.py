"""Exact one-step filtering recursions for conditionally Gaussian sequences.

Given the original-form coefficients, the conditional law of the state given
all observations so far stays Gaussian, and its mean/covariance follow a
closed-form recursion in which only the composite products

    ``b.b = b1 b1* + b2 b2*``,  ``b.B = b1 B1* + b2 B2*``,  ``B.B = B1 B1* + B2 B2*``

enter.  The innovation covariance is inverted with the PSD pseudo-inverse so
degenerate observations (e.g. ``B2 = 0``) are handled exactly.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _scalar
from .linalg import pinv_psd, symmetrize
from .model import DerivedParams, GaussianBelief, SystemParams, derive_original, validate_belief

__all__ = ["FilterError", "filter_step_original", "filter_step_reparam", "run_filter"]


class FilterError(RuntimeError):
    """Numerical failure inside the filter; carries the failing step index."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message if step is None else f"step {step}: {message}")


def filter_step_original(
    belief: GaussianBelief,
    p: SystemParams,
    d: DerivedParams,
    xi_next: np.ndarray,
) -> GaussianBelief:
    """One filtering update using original-form observation coefficients.

    Parameters
    ----------
    belief : GaussianBelief
        Current conditional mean/covariance of the state.
    p : SystemParams
        Supplies the transition blocks ``a0, a1, b1, b2``.
    d : DerivedParams
        Original-form observation blocks ``A0, A1, B1, B2``.
    xi_next : np.ndarray
        Next observation vector, shape ``(l,)``.

    Returns
    -------
    GaussianBelief
        Updated belief; covariance re-symmetrized and exact even when the
        innovation covariance is singular.
    """
    m, g = belief
    xi_next = np.atleast_1d(np.asarray(xi_next, dtype=float))
    bb = p.b1 @ p.b1.T + p.b2 @ p.b2.T
    bB = p.b1 @ d.B1.T + p.b2 @ d.B2.T
    BB = d.B1 @ d.B1.T + d.B2 @ d.B2.T
    cross = bB + p.a1 @ g @ d.A1.T
    innov_cov = symmetrize(BB + d.A1 @ g @ d.A1.T)
    gain = cross @ pinv_psd(innov_cov)
    m_new = p.a0 + p.a1 @ m + gain @ (xi_next - d.A0 - d.A1 @ m)
    g_new = symmetrize(p.a1 @ g @ p.a1.T + bb - gain @ cross.T)
    if not (np.all(np.isfinite(m_new)) and np.all(np.isfinite(g_new))):
        raise FilterError("filter update produced non-finite values")
    return GaussianBelief(m=m_new, gamma=g_new)


def filter_step_reparam(
    belief: GaussianBelief, p: SystemParams, xi_next: np.ndarray
) -> GaussianBelief:
    """One filtering update for reparameterized coefficients (derives, then updates)."""
    return filter_step_original(belief, p, derive_original(p), xi_next)


def _normalize_inputs(
    p_seq: SystemParams | Sequence[SystemParams], xi: np.ndarray
) -> tuple[list[SystemParams], np.ndarray]:
    xi = np.asarray(xi, dtype=float)
    if isinstance(p_seq, SystemParams):
        k, l = p_seq.dims
        if xi.ndim == 1 and l != 1:
            raise ValueError("1-d observations require l = 1")
        T = xi.shape[0]
        params = [p_seq] * T
    else:
        params = list(p_seq)
        T = len(params)
        if xi.shape[0] != T:
            raise ValueError(f"length mismatch: {T} parameter sets vs {xi.shape[0]} observations")
    if xi.ndim == 1:
        xi = xi[:, None]
    return params, xi


def _is_scalar_seq(params: list[SystemParams]) -> bool:
    return bool(params) and all(p.dims == (1, 1) for p in params)


def _pack_scalar(params: list[SystemParams]) -> tuple[np.ndarray, ...]:
    T = len(params)
    out = tuple(np.empty(T) for _ in range(8))
    for t, p in enumerate(params):
        vals = (p.a0[0], p.a1[0, 0], p.b1[0, 0], p.b2[0, 0],
                p.A0t[0], p.A1t[0, 0], p.B1t[0, 0], p.B2t[0, 0])
        for arr, v in zip(out, vals):
            arr[t] = v
    return out


def run_filter(
    p_seq: SystemParams | Sequence[SystemParams],
    xi: np.ndarray,
    init: GaussianBelief,
    validate: bool = False,
) -> list[GaussianBelief]:
    """Run the filter over a whole observation sequence.

    Parameters
    ----------
    p_seq : SystemParams or sequence of SystemParams
        Coefficients per step (a single set is broadcast over all steps).
    xi : np.ndarray
        Observations, shape ``(T, l)`` (or ``(T,)`` for scalar systems).
    init : GaussianBelief
        Belief about the state before the first observation in ``xi``.
    validate : bool
        If True, check symmetry/PSD of every covariance (test mode).

    Returns
    -------
    list of GaussianBelief
        ``T + 1`` beliefs; entry 0 is ``init``.
    """
    params, xi2 = _normalize_inputs(p_seq, xi)
    T = len(params)
    if T == 0:
        return [init]
    if _is_scalar_seq(params) and not validate:
        arrs = _pack_scalar(params)
        m, g = _scalar.filter_scalar(xi2[:, 0], *arrs, float(init.m[0]), float(init.gamma[0, 0]))
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(g))):
            bad = int(np.argmax(~(np.isfinite(m) & np.isfinite(g))))
            raise FilterError("filter update produced non-finite values", step=bad)
        return [GaussianBelief(m=np.array([m[t]]), gamma=np.array([[g[t]]])) for t in range(T + 1)]
    beliefs = [init]
    for t in range(T):
        try:
            beliefs.append(filter_step_original(beliefs[-1], params[t], derive_original(params[t]), xi2[t]))
        except FilterError as err:
            raise FilterError(str(err), step=t) from err
        if validate:
            validate_belief(beliefs[-1])
    return beliefs
