"""Controllability and observability gramians and their energy forms."""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .config import DEFAULT_KRONECKER_LIMIT
from .errors import DimensionMismatch, NotPositiveDefinite, NumericalFailure, SingularMatrix, UnstableSystem
from .statespace import is_stable

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GramianPair:
    """Controllability (xc) and observability (yo) gramians.

    horizon is the integration horizon tau, math.inf for the infinite one.
    """
    xc: np.ndarray
    yo: np.ndarray
    horizon: float = math.inf

    @property
    def is_infinite(self):
        return math.isinf(self.horizon)

    @property
    def n(self):
        return self.xc.shape[0]


def _symmetrize(x):
    return (x + x.T) / 2


def _check_square_pair(a, q):
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or q.shape != a.shape:
        raise DimensionMismatch(f"Lyapunov data must be square and equal, got {a.shape} and {q.shape}")
    return a, q


def lyapunov_solve(a, q, kronecker_limit=DEFAULT_KRONECKER_LIMIT):
    """Solve a X + X a^T + q = 0 for symmetric X.

    Orders up to kronecker_limit use the vectorized n^2 x n^2 system;
    larger ones use the Schur-based Bartels-Stewart solver.

    Raises:
        UnstableSystem: a has an eigenvalue with non-negative real part.
        NumericalFailure: the Lyapunov operator is singular to working precision.
    """
    a, q = _check_square_pair(a, q)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    abscissa = float(np.max(linalg.eigenvalues(a).real))
    if abscissa >= 0:
        raise UnstableSystem(f"Lyapunov equation needs a stable matrix "
                             f"(spectral abscissa {abscissa:.6g})", abscissa=abscissa)
    if not np.any(q):
        return np.zeros((n, n))

    if n <= kronecker_limit:
        eye = np.eye(n)
        operator = np.kron(eye, a) + np.kron(a, eye)
        try:
            vec_x = linalg.solve(operator, -q.reshape(-1, order='F'))
        except SingularMatrix as e:
            raise NumericalFailure(f"Lyapunov operator is singular (pivot {e.pivot:.3e})") from e
        x = vec_x.reshape((n, n), order='F')
    else:
        logger.debug(f"Using Bartels-Stewart for order {n}")
        x = scipy.linalg.solve_continuous_lyapunov(a, -q)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure("Bartels-Stewart solver returned non-finite values")

    x = _symmetrize(x)
    residual = np.linalg.norm(a @ x + x @ a.T + q)
    if residual > 1e-9 * np.linalg.norm(q):
        logger.warning(f"Lyapunov residual {residual:.3e} exceeds 1e-9 |q| = {1e-9 * np.linalg.norm(q):.3e}")
    return x


def infinite_gramians(model, kronecker_limit=DEFAULT_KRONECKER_LIMIT):
    """Infinite-horizon gramians of a stable model."""
    stable, abscissa = is_stable(model)
    if not stable:
        raise UnstableSystem(f"Infinite gramians need a stable model "
                             f"(spectral abscissa {abscissa:.6g})", abscissa=abscissa)
    xc = lyapunov_solve(model.a, model.b @ model.b.T, kronecker_limit)
    yo = lyapunov_solve(model.a.T, model.c.T @ model.c, kronecker_limit)
    return GramianPair(xc, yo, math.inf)


def _finite_integral(a, q, tau):
    """int_0^tau e^{As} q e^{A^T s} ds via Van Loan's block exponential.

    Evaluated on a short step h = tau / 2^k and doubled k times with
    X(2t) = X(t) + e^{At} X(t) e^{A^T t}.
    """
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 1)) * tau
    doublings = max(0, math.ceil(math.log2(norm))) if norm > 1 else 0
    h = tau / 2 ** doublings
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -a
    block[:n, n:] = q
    block[n:, n:] = a.T
    exp_block = linalg.expm(block * h)
    propagator = exp_block[n:, n:].T
    x = propagator @ exp_block[:n, n:]
    for _ in range(doublings):
        x = x + propagator @ x @ propagator.T
        propagator = propagator @ propagator
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(propagator))):
        raise NumericalFailure(f"Finite gramian overflowed at tau={tau}")
    return _symmetrize(x)


def finite_gramians(model, tau):
    """Gramians integrated over [0, tau]; no stability requirement."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if model.n == 0:
        return GramianPair(np.zeros((0, 0)), np.zeros((0, 0)), float(tau))
    xc = _finite_integral(model.a, model.b @ model.b.T, tau)
    yo = _finite_integral(model.a.T, model.c.T @ model.c, tau)
    return GramianPair(xc, yo, float(tau))


def _as_state(x0, n):
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != n:
        raise DimensionMismatch(f"State vector has length {x0.shape[0]}, model order is {n}")
    return x0


def output_energy(gramians, x0):
    """x0^T yo x0: energy of the free response from x0."""
    x0 = _as_state(x0, gramians.n)
    return float(x0 @ gramians.yo @ x0)


def min_input_energy(gramians, x0):
    """x0^T xc^-1 x0: smallest input energy steering the origin to x0.

    Raises:
        NotPositiveDefinite: xc has an eigenvalue below 1e-12 * trace(xc).
    """
    x0 = _as_state(x0, gramians.n)
    xc = gramians.xc
    if xc.size == 0:
        return 0.0
    smallest = float(np.linalg.eigvalsh(xc)[0])
    if smallest <= 1e-12 * float(np.trace(xc)):
        raise NotPositiveDefinite(
            f"Controllability gramian is singular to tolerance (eigenvalue {smallest:.3e})",
            value=smallest)
    factor = linalg.cholesky(xc).factor
    w = scipy.linalg.solve_triangular(factor, x0, lower=True)
    return float(w @ w)


def _rayleigh(matrix, x0):
    norm_sq = float(x0 @ x0)
    if norm_sq == 0.0:
        raise ValueError("Direction must be non-zero")
    return float(x0 @ matrix @ x0) / norm_sq


def observability_measure(gramians, x0):
    """Output energy per unit initial-state energy in direction x0."""
    return _rayleigh(gramians.yo, _as_state(x0, gramians.n))


def controllability_measure(gramians, x0):
    """x0^T xc x0 / |x0|^2; larger values mean x0 is cheaper to reach."""
    return _rayleigh(gramians.xc, _as_state(x0, gramians.n))


def ellipsoid_axes(gramian):
    """Principal axes of the gramian ellipsoid, longest first.

    Returns:
        (lengths, directions) with directions as columns.
    """
    gramian = np.asarray(gramian, dtype=float)
    values, vectors = np.linalg.eigh(_symmetrize(gramian))
    order = np.argsort(values)[::-1]
    return np.clip(values[order], 0.0, None), vectors[:, order]


def transform_gramians(gramians, t):
    """Gramians in the coordinates z = T x: T xc T^T and T^-T yo T^-1."""
    if t.n != gramians.n:
        raise DimensionMismatch(f"Transform is {t.n}x{t.n} but gramians are {gramians.n}x{gramians.n}")
    xc = _symmetrize(t.t @ gramians.xc @ t.t.T)
    yo = _symmetrize(t.t_inv.T @ gramians.yo @ t.t_inv)
    return GramianPair(xc, yo, gramians.horizon)
