"""Posterior path sampling for correlated transition/measurement noise.

The joint posterior of the state path factorizes backward in time.  Because
the two equations share shocks, the backward factor at time ``t`` keeps an
extra term: the conditional density of the *next observation* given the next
and current states.  The kernel below is that three-factor conditional,

    p(state_t | state_{t+1}, obs_{t+1}, beliefs_t)  ~  N(Vt @ Wt, Vt),

which collapses to the classical forward-filtering backward-sampling kernel
whenever measurement noise shares no shock with the transition.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from . import _scalar
from .filtering import _is_scalar_seq, _normalize_inputs, _pack_scalar, run_filter
from .linalg import DEFAULT_TOL, pinv_psd, psd_sqrt, symmetrize
from .model import DerivedParams, GaussianBelief, SystemParams, derive_original

__all__ = ["BackwardKernel", "DegenerateStateError", "backward_kernel", "sample_path"]


class DegenerateStateError(RuntimeError):
    """Backward kernel carries no information at all; carries the step index."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message if step is None else f"step {step}: {message}")


class BackwardKernel(NamedTuple):
    """Backward conditional ``N(Vt @ Wt, Vt)`` plus the observation residual covariance."""

    Vt: np.ndarray
    Wt: np.ndarray
    SigmaT: np.ndarray


def _likelihood_terms(
    p: SystemParams,
    d: DerivedParams,
    theta_next: np.ndarray,
    xi_next: np.ndarray,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadratic/linear coefficients in state_t of the two likelihood factors.

    Returns ``(A_lik, c_lik, Sigma)`` where the joint density of
    ``(obs_{t+1}, state_{t+1})`` given ``state_t`` contributes
    ``exp(-0.5 x' A_lik x + x' c_lik)`` as a function of ``x = state_t``.
    """
    bb = symmetrize(p.b1 @ p.b1.T + p.b2 @ p.b2.T)
    Bb = d.B1 @ p.b1.T + d.B2 @ p.b2.T
    bb_pinv = pinv_psd(bb, tol)
    C = Bb @ bb_pinv
    sigma = symmetrize(d.B1 @ d.B1.T + d.B2 @ d.B2.T - C @ Bb.T)
    sigma_pinv = pinv_psd(sigma, tol)
    resid_coef = d.A1 - C @ p.a1
    dtheta = theta_next - p.a0
    resid = xi_next - d.A0 - C @ dtheta
    a_lik = symmetrize(resid_coef.T @ sigma_pinv @ resid_coef + p.a1.T @ bb_pinv @ p.a1)
    c_lik = resid_coef.T @ sigma_pinv @ resid + p.a1.T @ bb_pinv @ dtheta
    return a_lik, c_lik, sigma


def backward_kernel(
    p: SystemParams,
    belief_t: GaussianBelief,
    theta_next: np.ndarray,
    xi_next: np.ndarray,
    d: DerivedParams | None = None,
    tol: float = DEFAULT_TOL,
) -> BackwardKernel:
    """Backward sampling kernel at one step, with pseudo-inverses throughout.

    ``belief_t`` is the forward filtering belief at time ``t``; ``theta_next``
    and ``xi_next`` are the already-sampled next state and the observation at
    ``t + 1``.  Raises :class:`DegenerateStateError` when the combined
    precision has no positive eigenvalue (nothing constrains the state).
    """
    if d is None:
        d = derive_original(p)
    theta_next = np.atleast_1d(np.asarray(theta_next, dtype=float))
    xi_next = np.atleast_1d(np.asarray(xi_next, dtype=float))
    m, g = belief_t
    a_lik, c_lik, sigma = _likelihood_terms(p, d, theta_next, xi_next, tol)
    g_pinv = pinv_psd(g, tol)
    v_inv = symmetrize(a_lik + g_pinv)
    eigs = np.linalg.eigvalsh(v_inv)
    if eigs[-1] <= 0.0:
        raise DegenerateStateError("backward kernel precision is identically zero")
    w = c_lik + g_pinv @ m
    return BackwardKernel(Vt=pinv_psd(v_inv, tol), Wt=w, SigmaT=sigma)


def _draw_restricted(
    a_lik: np.ndarray,
    c_lik: np.ndarray,
    m: np.ndarray,
    gamma: np.ndarray,
    z: np.ndarray,
    tol: float,
) -> np.ndarray:
    """Exact conditional draw when the prior covariance may be rank deficient.

    The state is constrained to the affine subspace ``m + range(gamma)``;
    within it the prior is proper, so the posterior precision is invertible
    and pseudo-inverses are not needed.  With full-rank ``gamma`` this equals
    the plain ``N(Vt Wt, Vt)`` draw.
    """
    lam, u = np.linalg.eigh(symmetrize(gamma))
    cutoff = tol * max(float(lam[-1]), 0.0)
    keep = lam > cutoff
    r = int(np.count_nonzero(keep))
    if r == 0:
        return m.copy()
    ur = u[:, keep]
    prec_z = ur.T @ a_lik @ ur + np.diag(1.0 / lam[keep])
    chol = np.linalg.cholesky(symmetrize(prec_z))
    rhs = ur.T @ (c_lik - a_lik @ m)
    mean_z = np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))
    zdraw = mean_z + np.linalg.solve(chol.T, z[:r])
    return m + ur @ zdraw


def sample_path(
    p_seq: SystemParams | Sequence[SystemParams],
    xi: np.ndarray,
    init: GaussianBelief,
    rng: np.random.Generator,
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Joint posterior draw of the state path given all observations.

    Runs the forward filter, draws the final state from its filtered law,
    then walks backward through the kernel of :func:`backward_kernel`
    (extended down to the initial state, which is pinned when its belief is
    degenerate).

    Returns
    -------
    np.ndarray
        Sampled path, shape ``(T + 1, k)`` for vector states or ``(T + 1,)``
        when ``k = l = 1`` and ``xi`` was passed one-dimensional.
    """
    params, xi2 = _normalize_inputs(p_seq, xi)
    T = len(params)
    beliefs = run_filter(params if T else [], xi2, init)
    scalar_in = np.asarray(xi).ndim == 1
    if _is_scalar_seq(params):
        arrs = _pack_scalar(params)
        m = np.array([b.m[0] for b in beliefs])
        g = np.array([b.gamma[0, 0] for b in beliefs])
        z = rng.standard_normal(T + 1)
        # draw order matches the matrix path: final state first, then backward
        zz = np.empty(T + 1)
        zz[T::-1] = z
        theta = _scalar.sample_scalar(xi2[:, 0], *arrs, m, g, zz)
        return theta if scalar_in else theta[:, None]
    k = init.m.shape[0]
    theta = np.empty((T + 1, k))
    theta[T] = beliefs[T].m + psd_sqrt(beliefs[T].gamma, tol) @ rng.standard_normal(k)
    for t in range(T - 1, -1, -1):
        d = derive_original(params[t])
        a_lik, c_lik, _ = _likelihood_terms(params[t], d, theta[t + 1], xi2[t], tol)
        theta[t] = _draw_restricted(
            a_lik, c_lik, beliefs[t].m, beliefs[t].gamma, rng.standard_normal(k), tol
        )
    return theta[:, 0] if (scalar_in and k == 1) else theta
