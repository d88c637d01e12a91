"""Controllability/observability tests, staircase forms and the Kalman decomposition."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg
from .config import default_rank_tol
from .errors import DimensionMismatch, NumericalFailure
from .statespace import SimilarityTransform, StateSpaceModel, apply_similarity

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KalmanDecomposition:
    """Model in Kalman coordinates x = (x1, x2, x3, x4).

    x1 controllable and observable, x2 controllable only, x3 observable only,
    x4 neither. The transform maps original coordinates to these.
    """
    transformed: StateSpaceModel
    transform: SimilarityTransform
    dim_co: int
    dim_cno: int
    dim_nco: int
    dim_ncno: int

    @property
    def n(self):
        return self.dim_co + self.dim_cno + self.dim_nco + self.dim_ncno

    @property
    def dims(self):
        return self.dim_co, self.dim_cno, self.dim_nco, self.dim_ncno

    @property
    def is_static(self):
        """True when no state is both controllable and observable."""
        return self.dim_co == 0

    def slices(self):
        """Index slices of the four state groups in Kalman coordinates."""
        edges = np.cumsum([0, self.dim_co, self.dim_cno, self.dim_nco, self.dim_ncno])
        return tuple(slice(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]))


def controllability_matrix(a, b):
    """[B, AB, ..., A^(n-1) B]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"A is {a.shape[0]}x{a.shape[1]}, B is {b.shape[0]}x{b.shape[1]}")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    blocks = [b]
    for _ in range(1, n):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def observability_matrix(c, a):
    """[C; CA; ...; CA^(n-1)]."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    if a.shape[0] != a.shape[1] or c.shape[1] != a.shape[0]:
        raise DimensionMismatch(f"C is {c.shape[0]}x{c.shape[1]}, A is {a.shape[0]}x{a.shape[1]}")
    return controllability_matrix(a.T, c.T).T


def is_controllable_pair(a, b, rel_tol=None):
    n = np.asarray(a).shape[0]
    return linalg.numerical_rank(controllability_matrix(a, b), rel_tol) == n


def is_observable_pair(c, a, rel_tol=None):
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    # Same computation as the controllable dual, so the two always agree
    return is_controllable_pair(a.T, c.T, rel_tol)


def _staircase(a, b, threshold):
    """Orthogonal Q and rank r_c with Q^T A Q block upper triangular.

    Deflates the range of B, then of the coupling block A21, until the
    coupling has no singular value above threshold.
    """
    n = a.shape[0]
    q = np.eye(n)
    a_t = a.copy()
    b_t = b.copy()
    offset = 0
    block = b_t
    while offset < n and block.size:
        u, s, _ = scipy.linalg.svd(block, full_matrices=True)
        rank = int(np.count_nonzero(s > threshold))
        logger.debug(f"Staircase step at offset {offset}: block {block.shape}, rank {rank}")
        if rank == 0:
            break
        step = np.eye(n)
        step[offset:, offset:] = u
        a_t = step.T @ a_t @ step
        b_t = step.T @ b_t
        q = q @ step
        previous = offset
        offset += rank
        block = a_t[offset:, previous:offset]
    return q, offset


def _threshold(model, rel_tol):
    if rel_tol is None:
        rel_tol = default_rank_tol()
    return rel_tol * model.scale()


def controllable_staircase(model, rel_tol=None):
    """Orthogonal controllable/uncontrollable separation.

    Returns:
        (transformed model, transform, r_c) with the leading r_c x r_c pair
        controllable and the lower blocks of A and B below the tolerance.
    """
    q, r_c = _staircase(model.a, model.b, _threshold(model, rel_tol))
    transform = SimilarityTransform.orthogonal(q)
    return apply_similarity(model, transform), transform, r_c


def observable_staircase(model, rel_tol=None):
    """Dual of controllable_staircase: A block lower triangular, C = [C1 0]."""
    q, r_o = _staircase(model.a.T, model.c.T, _threshold(model, rel_tol))
    transform = SimilarityTransform.orthogonal(q)
    return apply_similarity(model, transform), transform, r_o


def _orthonormal_range(m, rank):
    if rank == 0:
        return np.zeros((m.shape[0], 0))
    u, _, _ = scipy.linalg.svd(m, full_matrices=False)
    return u[:, :rank]


def kalman_decompose(model, rel_tol=None):
    """Kalman decomposition into the four controllable/observable groups.

    The controllable subspace R comes from the controllable staircase, its
    observable split from the staircase of the controllable part, and the
    unobservable subspace N from the observable staircase of the whole model.
    Bases: x1, x2 split R; x4 spans N orthogonal to x2; x3 completes.
    """
    n = model.n
    threshold = _threshold(model, rel_tol)
    if n == 0:
        return KalmanDecomposition(model, SimilarityTransform.identity(0), 0, 0, 0, 0)

    q_c, r_c = _staircase(model.a, model.b, threshold)
    reach = q_c[:, :r_c]
    a11 = reach.T @ model.a @ reach
    c1 = model.c @ reach
    q_a, r_co = _staircase(a11.T, c1.T, threshold)
    x1 = reach @ q_a[:, :r_co]
    x2 = reach @ q_a[:, r_co:]

    q_o, r_o = _staircase(model.a.T, model.c.T, threshold)
    unobservable = q_o[:, r_o:]

    dim_co = r_co
    dim_cno = r_c - r_co
    dim_ncno = (n - r_o) - dim_cno
    dim_nco = n - r_c - dim_ncno
    if dim_ncno < 0 or dim_nco < 0:
        raise NumericalFailure(
            f"Inconsistent rank decisions (r_c={r_c}, r_o={r_o}, r_co={r_co}); "
            f"try a different rank tolerance")

    projected = unobservable - x2 @ (x2.T @ unobservable)
    x4 = _orthonormal_range(projected, dim_ncno)
    spanned = np.hstack([x1, x2, x4])
    if spanned.shape[1] < n:
        u, _, _ = scipy.linalg.svd(spanned, full_matrices=True)
        x3 = u[:, spanned.shape[1]:]
    else:
        x3 = np.zeros((n, 0))

    basis = np.hstack([x1, x2, x3, x4])
    transform = SimilarityTransform(linalg.solve(basis, np.eye(n)), basis,
                                    float(np.linalg.cond(basis)))
    transformed = apply_similarity(model, transform)
    logger.info(f"Kalman decomposition of order {n}: co={dim_co}, cno={dim_cno}, "
                f"nco={dim_nco}, ncno={dim_ncno}")
    return KalmanDecomposition(transformed, transform, dim_co, dim_cno, dim_nco, dim_ncno)


def minimal_realization(model, rel_tol=None):
    """Controllable-and-observable part of the Kalman decomposition.

    Returns:
        (minimal model, decomposition). An order-0 model carrying D is
        returned when no state is both controllable and observable.
    """
    decomposition = kalman_decompose(model, rel_tol)
    k = decomposition.dim_co
    if decomposition.is_static:
        logger.warning("No controllable and observable states; returning static gain")
        return StateSpaceModel.static(model.d, label=model.label), decomposition
    t = decomposition.transformed
    minimal = StateSpaceModel(t.a[:k, :k], t.b[:k, :], t.c[:, :k], model.d, label=model.label)
    logger.info(f"Minimal realization: order {model.n} -> {k}")
    return minimal, decomposition
