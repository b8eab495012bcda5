"""Sequential scalar (k = l = 1) recursions, JIT-compiled when numba is available.

These are the only hot loops in the package that cannot be vectorized across
time (each step depends on the previous one).  The functions take per-step
coefficient arrays in the reparameterized layout and must agree with the
general matrix implementations in :mod:`cgseq.filtering` / :mod:`cgseq.sampling`
to 1e-13; the tests enforce that.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrap(func):
            return func
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def filter_scalar(xi, a0, a1, b1, b2, A0t, A1t, B1t, B2t, m0, g0):
    """Forward filter for a scalar reparameterized system.

    ``xi`` holds the T observations consumed by the recursion; coefficient
    arrays have length T.  Returns mean and variance arrays of length T + 1
    (entry 0 is the initial belief).
    """
    T = xi.shape[0]
    m = np.empty(T + 1)
    g = np.empty(T + 1)
    m[0] = m0
    g[0] = g0
    for t in range(T):
        A0 = A0t[t] + A1t[t] * a0[t]
        A1 = A1t[t] * a1[t]
        B1 = A1t[t] * b1[t] + B1t[t]
        B2 = A1t[t] * b2[t] + B2t[t]
        bb = b1[t] * b1[t] + b2[t] * b2[t]
        bB = b1[t] * B1 + b2[t] * B2
        BB = B1 * B1 + B2 * B2
        num = bB + a1[t] * g[t] * A1
        den = BB + A1 * g[t] * A1
        gain = num / den if den > 0.0 else 0.0
        m[t + 1] = a0[t] + a1[t] * m[t] + gain * (xi[t] - A0 - A1 * m[t])
        gnew = a1[t] * g[t] * a1[t] + bb - gain * num
        g[t + 1] = gnew if gnew > 0.0 else 0.0
    return m, g


@njit(cache=True)
def sample_scalar(xi, a0, a1, b1, b2, A0t, A1t, B1t, B2t, m, g, z):
    """Backward draw of the full state path given forward beliefs.

    ``z`` is a vector of T + 1 standard normals; states with exactly zero
    filtered variance are pinned to their filtered mean (degenerate prior).
    """
    T = xi.shape[0]
    theta = np.empty(T + 1)
    theta[T] = m[T] + np.sqrt(g[T]) * z[T] if g[T] > 0.0 else m[T]
    for t in range(T - 1, -1, -1):
        if g[t] <= 0.0:
            theta[t] = m[t]
            continue
        A0 = A0t[t] + A1t[t] * a0[t]
        A1 = A1t[t] * a1[t]
        B1 = A1t[t] * b1[t] + B1t[t]
        B2 = A1t[t] * b2[t] + B2t[t]
        bb = b1[t] * b1[t] + b2[t] * b2[t]
        Bb = B1 * b1[t] + B2 * b2[t]
        c = Bb / bb if bb > 0.0 else 0.0
        sig = B1 * B1 + B2 * B2 - c * Bb
        resid_coef = A1 - c * a1[t]
        a_lik = a1[t] * a1[t] / bb if bb > 0.0 else 0.0
        c_lik = a1[t] * (theta[t + 1] - a0[t]) / bb if bb > 0.0 else 0.0
        if sig > 0.0:
            r = xi[t] - A0 - c * (theta[t + 1] - a0[t])
            a_lik += resid_coef * resid_coef / sig
            c_lik += resid_coef * r / sig
        v_inv = a_lik + 1.0 / g[t]
        v = 1.0 / v_inv
        mean = v * (c_lik + m[t] / g[t])
        theta[t] = mean + np.sqrt(v) * z[t]
    return theta


@njit(cache=True)
def gamma_iterate(b1: float, B1t: float, B2t: float, n_steps: int, g0: float) -> float:
    """Iterate the unit-root filtering variance recursion ``n_steps`` times."""
    B1 = b1 + B1t
    den_const = B1 * B1 + B2t * B2t
    g = g0
    for _ in range(n_steps):
        num = b1 * B1 + g
        g = (g + b1 * b1) - num * num / (den_const + g)
        if g < 0.0:
            g = 0.0
    return g
