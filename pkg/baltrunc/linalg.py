"""Dense real-matrix kernels shared by every other module.

Matrices are float64 numpy arrays; the heavy lifting is LAPACK through scipy.
Each kernel checks its preconditions and turns LAPACK failures into the
package's structured errors.
"""
import logging
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (
    AsymmetricMatrix,
    DimensionMismatch,
    InvalidMatrix,
    NotPositiveDefinite,
    NumericalFailure,
    SingularMatrix,
)

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class SVDResult(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


class CholeskyResult(NamedTuple):
    factor: np.ndarray
    clamped: int


def as_matrix(value, name="matrix"):
    """Coerce to a finite 2-D float64 array."""
    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def as_complex_matrix(value, name="matrix"):
    """Coerce to a finite 2-D complex128 array."""
    arr = np.array(value, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def _require_square(a, name):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")


def multiply(a, b):
    """Matrix product with a shape check."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(
            f"Cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def solve(a, b):
    """Solve a @ X = b by LU with partial pivoting.

    Args:
        a: Square coefficient matrix (real or complex).
        b: Right-hand side with a.shape[0] rows.

    Raises:
        SingularMatrix: the smallest pivot is below n*eps*max|U|.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    _require_square(a, "a")
    vector_rhs = b.ndim == 1
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"Right-hand side has {b.shape[0]} rows, coefficient matrix is "
            f"{a.shape[0]}x{a.shape[1]}")
    n = a.shape[0]
    if n == 0:
        return np.zeros_like(b, dtype=np.result_type(a, b, float))

    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    smallest = float(pivots.min())
    if smallest <= n * EPS * float(np.abs(lu).max()):
        logger.debug(f"LU pivot {smallest:.3e} below working precision")
        raise SingularMatrix(
            f"Matrix is singular to working precision (pivot {smallest:.3e})",
            pivot=smallest)
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    return x.ravel() if vector_rhs else x


def svd(m):
    """Thin SVD m = U diag(s) V^T with s descending."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return SVDResult(np.zeros((m.shape[0], 0)), np.zeros(0), np.zeros((m.shape[1], 0)))
    try:
        u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver='gesdd')
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge, retrying with gesvd")
        try:
            u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver='gesvd')
        except np.linalg.LinAlgError as e:
            raise NumericalFailure(f"SVD did not converge: {e}")
    return SVDResult(u, s, vh.T)


def eigenvalues(a):
    """All eigenvalues of a square matrix (Hessenberg reduction + shifted QR)."""
    a = np.asarray(a, dtype=float)
    _require_square(a, "a")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return scipy.linalg.eigvals(a, check_finite=False).astype(complex)
    except np.linalg.LinAlgError as e:
        raise NumericalFailure(f"Eigenvalue iteration did not converge: {e}")


def cholesky(s, shift_tol=1e-14):
    """Lower Cholesky factor of a symmetric (semi)definite matrix.

    Pivots in (-shift_tol*|s|, 0] are clamped to shift_tol*|s| so that
    numerically semidefinite gramians still factor; the number of clamped
    pivots is returned with the factor.

    Raises:
        AsymmetricMatrix: s is not symmetric within 1e-12 relative.
        NotPositiveDefinite: a pivot falls below -shift_tol*|s|.
    """
    s = np.asarray(s, dtype=float)
    _require_square(s, "s")
    n = s.shape[0]
    if n == 0:
        return CholeskyResult(np.zeros((0, 0)), 0)
    scale = float(np.linalg.norm(s, 'fro'))
    if np.linalg.norm(s - s.T, 'fro') > 1e-12 * max(scale, np.finfo(float).tiny):
        raise AsymmetricMatrix("Cholesky input is not symmetric")
    if scale == 0.0:
        raise NotPositiveDefinite("Cholesky input is the zero matrix", value=0.0)

    try:
        return CholeskyResult(scipy.linalg.cholesky(s, lower=True, check_finite=False), 0)
    except np.linalg.LinAlgError:
        logger.debug("LAPACK Cholesky failed, falling back to clamped factorization")

    floor = shift_tol * scale
    lower = np.zeros_like(s)
    clamped = 0
    for j in range(n):
        row = lower[j, :j]
        pivot = s[j, j] - row @ row
        if pivot <= floor:
            if pivot < -floor:
                raise NotPositiveDefinite(
                    f"Cholesky pivot {pivot:.3e} at index {j} is negative", value=float(pivot))
            pivot = floor
            clamped += 1
        lower[j, j] = np.sqrt(pivot)
        lower[j + 1:, j] = (s[j + 1:, j] - lower[j + 1:, :j] @ row) / lower[j, j]
    if clamped:
        logger.warning(f"Cholesky clamped {clamped} of {n} pivots to {floor:.3e}")
    return CholeskyResult(lower, clamped)


def psd_factor(s, neg_tol=1e-10):
    """Square factor L with L L^T = s from the eigendecomposition of sym(s).

    Eigenvalues in [-neg_tol*|s|, 0) are rounding noise and clip to zero;
    the count of eigenvalues at or below n*eps*lambda_max is returned as
    the clamp count.

    Raises:
        AsymmetricMatrix: s is not symmetric within 1e-12 relative.
        NotPositiveDefinite: an eigenvalue falls below -neg_tol*|s|.
    """
    s = np.asarray(s, dtype=float)
    _require_square(s, "s")
    n = s.shape[0]
    if n == 0:
        return CholeskyResult(np.zeros((0, 0)), 0)
    scale = float(np.linalg.norm(s, 'fro'))
    if np.linalg.norm(s - s.T, 'fro') > 1e-12 * max(scale, np.finfo(float).tiny):
        raise AsymmetricMatrix("Factor input is not symmetric")
    if scale == 0.0:
        raise NotPositiveDefinite("Factor input is the zero matrix", value=0.0)

    w, v = scipy.linalg.eigh(0.5 * (s + s.T), check_finite=False)
    if w[0] < -neg_tol * scale:
        raise NotPositiveDefinite(f"Eigenvalue {w[0]:.3e} is below -{neg_tol:g}*|s|", value=float(w[0]))
    clamped = int(np.count_nonzero(w <= n * EPS * w[-1]))
    factor = v * np.sqrt(np.clip(w, 0.0, None))[None, :]
    return CholeskyResult(factor, clamped)


def expm(a):
    """Matrix exponential by scaling and squaring with a degree-13 Pade approximant."""
    a = np.asarray(a, dtype=float)
    _require_square(a, "a")
    if a.shape[0] == 0:
        return np.zeros((0, 0))
    with np.errstate(over='ignore', invalid='ignore'):
        result = scipy.linalg.expm(a)
    if not np.all(np.isfinite(result)):
        raise NumericalFailure(
            f"Matrix exponential overflowed (1-norm of argument {np.linalg.norm(a, 1):.3e})")
    return result


def default_rank_tol(shape):
    return max(shape) * EPS


def numerical_rank(m, rel_tol=None):
    """Number of singular values above rel_tol * sigma_max."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0
    if rel_tol is None:
        rel_tol = default_rank_tol(m.shape)
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    s = svd(m).s
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))
