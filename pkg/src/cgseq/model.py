"""Parameter containers for conditionally Gaussian state-space systems.

Two equivalent coefficient layouts are used throughout:

*reparameterized* (the natural econometric form, measurement loads on the
next state)::

    state_{t+1} = a0 + a1 @ state_t + b1 @ e1 + b2 @ e2
    obs_{t+1}   = A0t + A1t @ state_{t+1} + B1t @ e1 + B2t @ e2

*original* (measurement loads on the current state)::

    obs_{t+1}   = A0 + A1 @ state_t + B1 @ e1 + B2 @ e2

with ``e1``/``e2`` independent standard Gaussian vectors shared between the
two equations, which is what makes transition and measurement errors
correlated.  :func:`derive_original` maps the first layout onto the second.

State dimension is ``k``, observation dimension is ``l``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "SystemParams",
    "DerivedParams",
    "GaussianBelief",
    "derive_original",
    "iv_system",
    "validate_belief",
]


def _as_vector(x, n: int | None = None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if n is not None and v.shape != (n,):
        raise ValueError(f"expected vector of length {n}, got {v.shape}")
    return v


def _as_matrix(x, shape: tuple[int, int] | None = None) -> np.ndarray:
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if shape is not None and m.shape != shape:
        raise ValueError(f"expected matrix of shape {shape}, got {m.shape}")
    return m


class SystemParams(NamedTuple):
    """One time step of reparameterized system coefficients.

    Shapes: ``a0 (k,)``, ``a1 (k,k)``, ``b1 (k,k)``, ``b2 (k,l)``,
    ``A0t (l,)``, ``A1t (l,k)``, ``B1t (l,k)``, ``B2t (l,l)``.
    """

    a0: np.ndarray
    a1: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    A0t: np.ndarray
    A1t: np.ndarray
    B1t: np.ndarray
    B2t: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.a0.shape[0], self.A0t.shape[0]

    def validate(self) -> "SystemParams":
        k, l = self.dims
        _as_vector(self.a0, k)
        _as_matrix(self.a1, (k, k))
        _as_matrix(self.b1, (k, k))
        _as_matrix(self.b2, (k, l))
        _as_vector(self.A0t, l)
        _as_matrix(self.A1t, (l, k))
        _as_matrix(self.B1t, (l, k))
        _as_matrix(self.B2t, (l, l))
        for name, arr in self._asdict().items():
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"SystemParams.{name} contains non-finite entries")
        return self

    @classmethod
    def scalar(cls, a0, a1, b1, b2, A0t, A1t, B1t, B2t) -> "SystemParams":
        """Build a k = l = 1 parameter set from plain floats."""
        as_m = lambda x: np.array([[float(x)]])
        return cls(
            a0=np.array([float(a0)]),
            a1=as_m(a1),
            b1=as_m(b1),
            b2=as_m(b2),
            A0t=np.array([float(A0t)]),
            A1t=as_m(A1t),
            B1t=as_m(B1t),
            B2t=as_m(B2t),
        )


class DerivedParams(NamedTuple):
    """Original-form observation coefficients implied by a :class:`SystemParams`."""

    A0: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    B2: np.ndarray


class GaussianBelief(NamedTuple):
    """Filtering distribution of the state: mean ``m (k,)``, covariance ``gamma (k,k)``."""

    m: np.ndarray
    gamma: np.ndarray

    @classmethod
    def of(cls, m, gamma) -> "GaussianBelief":
        m = _as_vector(m)
        gamma = _as_matrix(gamma, (m.shape[0], m.shape[0]))
        return cls(m=m, gamma=gamma)


def validate_belief(belief: GaussianBelief, sym_rtol: float = 1e-12, psd_rtol: float = 1e-10) -> None:
    """Raise if the belief covariance is non-symmetric or meaningfully indefinite."""
    m, g = belief
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(g))):
        raise ValueError("belief contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(g - g.T)) > sym_rtol * scale:
        raise ValueError("belief covariance is not symmetric")
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    floor = -psd_rtol * max(float(np.trace(g)), 1e-300)
    if w[0] < floor:
        raise ValueError(f"belief covariance not PSD (min eigenvalue {w[0]:.3e})")


def derive_original(p: SystemParams) -> DerivedParams:
    """Map reparameterized coefficients onto original-form observation coefficients.

    ``A0 = A0t + A1t a0``, ``A1 = A1t a1``, ``B1 = A1t b1 + B1t``,
    ``B2 = A1t b2 + B2t``.
    """
    p.validate()
    return DerivedParams(
        A0=p.A0t + p.A1t @ p.a0,
        A1=p.A1t @ p.a1,
        B1=p.A1t @ p.b1 + p.B1t,
        B2=p.A1t @ p.b2 + p.B2t,
    )


def iv_system(b1: float, B1t: float, B2t: float) -> SystemParams:
    """Scalar unit-root price system with correlated microstructure noise.

    The latent log-price is a random walk with per-step return scale ``b1``;
    the observed log-price adds noise ``B1t * e1 + B2t * e2`` where ``e1`` is
    the same shock driving the return (endogenous noise).
    """
    return SystemParams.scalar(0.0, 1.0, b1, 0.0, 0.0, 1.0, B1t, B2t)
