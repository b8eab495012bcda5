"""Small dense linear-algebra helpers for covariance matrices.

All covariance-role matrices in this package are plain ``np.ndarray`` of
``float64``.  Rank deficiency is a normal operating condition (degenerate
observations, anchored initial states), so every inversion goes through the
PSD pseudo-inverse below rather than a plain inverse.
"""

from __future__ import annotations

import numpy as np

__all__ = ["symmetrize", "pinv_psd", "psd_sqrt", "min_eig_ratio"]

#: relative eigenvalue cutoff used everywhere a pseudo-inverse is taken
DEFAULT_TOL = 1e-12

# relative asymmetry tolerated before an input is rejected; producers in this
# package re-symmetrize after every update, so anything worse is a bug
_SYM_RTOL = 1e-8


def symmetrize(x: np.ndarray) -> np.ndarray:
    """Return ``(x + x.T) / 2`` to suppress round-off drift."""
    return 0.5 * (x + x.T)


def _check_square_symmetric(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(x))))
    if np.max(np.abs(x - x.T)) > _SYM_RTOL * scale:
        raise ValueError(f"{name} is not symmetric within tolerance")
    return x


def pinv_psd(x: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix.

    Computed through a symmetric eigendecomposition; eigenvalues at or below
    ``tol * max_eigenvalue`` (including small negatives from round-off) are
    treated as exact zeros.  The result is symmetrized.

    Raises
    ------
    ValueError
        If ``x`` is not square, not symmetric within tolerance, or contains
        NaN/inf entries.
    """
    x = _check_square_symmetric(x, "pinv_psd input")
    w, v = np.linalg.eigh(x)
    cutoff = tol * max(float(w[-1]), 0.0)
    inv_w = np.where(w > cutoff, 1.0, 0.0) / np.where(w > cutoff, w, 1.0)
    return symmetrize((v * inv_w) @ v.T)


def psd_sqrt(x: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symmetric square root of a (possibly rank-deficient) PSD matrix.

    Eigenvalues below the relative cutoff are clamped to zero, so the result
    is usable for sampling from degenerate Gaussians: ``x_sqrt @ z`` has
    covariance ``x`` for standard-normal ``z``.
    """
    x = _check_square_symmetric(x, "psd_sqrt input")
    w, v = np.linalg.eigh(x)
    cutoff = tol * max(float(w[-1]), 0.0)
    root = np.sqrt(np.where(w > cutoff, w, 0.0))
    return symmetrize((v * root) @ v.T)


def min_eig_ratio(x: np.ndarray) -> float:
    """Smallest eigenvalue divided by the trace; used for PSD sanity checks."""
    x = np.asarray(x, dtype=float)
    tr = float(np.trace(x))
    w = np.linalg.eigvalsh(x)
    return float(w[0]) / tr if tr > 0.0 else float(w[0])
