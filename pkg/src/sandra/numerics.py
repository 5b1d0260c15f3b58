"""Dense linear algebra for basis handling.

All matrices are row-major float64 ndarrays.  The pseudo-inverse uses the
normal-equation route ``(A^T A)^{-1} A^T`` through a symmetric
positive-definite factorization when the columns are independent (basis
matrices have small integer entries, so the Gram matrix is exactly
representable), and falls back to SVD with a relative cutoff otherwise.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, NonFiniteError

# relative singular-value cutoff: tau = RANK_RTOL * sigma_max
RANK_RTOL = 1e-10
# elementwise tolerance for A_pinv @ A == identity on full-column-rank input
IDENTITY_TOL = 1e-10
# elementwise tolerance for the four Penrose conditions
PENROSE_TOL = 1e-9


def as_matrix(a: np.ndarray, *, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(
            f"{name} must be 2-dimensional, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite values")
    return arr


def as_vector(v: np.ndarray, dim: Optional[int] = None, *, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatchError(
            f"{name} must be 1-dimensional, got shape {arr.shape}"
        )
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatchError(
            f"{name} has length {arr.shape[0]}, expected {dim}"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite values")
    return arr


def rank_of(a: np.ndarray) -> int:
    """Numerical rank with cutoff ``RANK_RTOL * sigma_max``."""
    arr = as_matrix(a)
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > RANK_RTOL * s[0]))


def svd_pseudo_inverse(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse through SVD; tolerates rank deficiency."""
    arr = as_matrix(a)
    m, k = arr.shape
    if arr.size == 0:
        return np.zeros((k, m))
    u, s, vt = np.linalg.svd(arr, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((k, m))
    cutoff = RANK_RTOL * s[0]
    inv = np.where(s > cutoff, np.divide(1.0, s, where=s > 0), 0.0)
    return (vt.T * inv) @ u.T


def pseudo_inverse(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose inverse, normal-equation route when columns are independent.

    The Cholesky route is attempted first; if the Gram matrix is not
    positive definite, or the result fails a quick left-inverse sanity
    check, the SVD route takes over.
    """
    arr = as_matrix(a)
    m, k = arr.shape
    if arr.size == 0:
        return np.zeros((k, m))
    gram = arr.T @ arr
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True)
        pinv = scipy.linalg.cho_solve(factor, arr.T)
    except scipy.linalg.LinAlgError:
        return svd_pseudo_inverse(arr)
    if not np.all(np.isfinite(pinv)):
        return svd_pseudo_inverse(arr)
    defect = np.max(np.abs(pinv @ arr - np.eye(k))) if k else 0.0
    if defect > IDENTITY_TOL:
        return svd_pseudo_inverse(arr)
    return pinv


def solve_coefficients(
    a: np.ndarray, v: np.ndarray, pinv: Optional[np.ndarray] = None
) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of ``v`` against the columns of ``a``.

    Returns ``(x, residual_norm)`` where ``x = a_pinv @ v`` and the residual
    norm is ``||a @ x - v||_2``, reported as a diagnostic.
    """
    arr = as_matrix(a)
    vec = as_vector(v, arr.shape[0])
    p = pseudo_inverse(arr) if pinv is None else as_matrix(pinv, name="pinv")
    if p.shape != (arr.shape[1], arr.shape[0]):
        raise DimensionMismatchError(
            f"pinv has shape {p.shape}, expected {(arr.shape[1], arr.shape[0])}"
        )
    x = p @ vec
    residual = float(np.linalg.norm(arr @ x - vec))
    return x, residual


def penrose_defects(a: np.ndarray, p: np.ndarray) -> dict[str, float]:
    """Max-abs defect of each of the four Penrose conditions for (a, p)."""
    arr = as_matrix(a)
    pin = as_matrix(p, name="pinv")
    ap = arr @ pin
    pa = pin @ arr
    return {
        "APA=A": float(np.max(np.abs(ap @ arr - arr))) if arr.size else 0.0,
        "PAP=P": float(np.max(np.abs(pa @ pin - pin))) if pin.size else 0.0,
        "(AP)^T=AP": float(np.max(np.abs(ap.T - ap))) if ap.size else 0.0,
        "(PA)^T=PA": float(np.max(np.abs(pa.T - pa))) if pa.size else 0.0,
    }
