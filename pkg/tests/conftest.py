import numpy as np
import pytest
from scipy.stats import ortho_group

from baltrunc.generators import gen_example
from baltrunc.statespace import StateSpaceModel, transfer_at


def balanced_siso(hsv):
    """Stable SISO model whose gramians both equal diag(hsv).

    b_i = sqrt(2 h_i), C = b^T and A_ij = -b_i b_j / (h_i + h_j).
    """
    h = np.asarray(hsv, dtype=float)
    b = np.sqrt(2 * h)
    a = -np.outer(b, b) / (h[:, None] + h[None, :])
    return StateSpaceModel.from_matrices(a, b[:, None], b[None, :])


def balanced_diagonal(hsv):
    """Decoupled model with B = C = I and A = diag(-1 / (2 h_i)); both gramians are diag(hsv)."""
    h = np.asarray(hsv, dtype=float)
    n = h.size
    return StateSpaceModel.from_matrices(np.diag(-1 / (2 * h)), np.eye(n), np.eye(n))


def planted_kalman(dims, seed):
    """Random model with the given (co, cno, nco, ncno) block structure, hidden by an orthogonal change of basis."""
    rng = np.random.default_rng(seed)
    k1, k2, k3, k4 = dims
    n = sum(dims)
    m, p = 2, 2

    def blk(r, c):
        return rng.standard_normal((r, c))

    z = np.zeros
    a = np.block([
        [blk(k1, k1), z((k1, k2)), blk(k1, k3), z((k1, k4))],
        [blk(k2, k1), blk(k2, k2), blk(k2, k3), blk(k2, k4)],
        [z((k3, k1)), z((k3, k2)), blk(k3, k3), z((k3, k4))],
        [z((k4, k1)), z((k4, k2)), blk(k4, k3), blk(k4, k4)],
    ])
    b = np.vstack([blk(k1, m), blk(k2, m), z((k3, m)), z((k4, m))])
    c = np.hstack([blk(p, k1), z((p, k2)), blk(p, k3), z((p, k4))])
    q = ortho_group.rvs(n, random_state=rng) if n > 1 else np.eye(n)
    return StateSpaceModel.from_matrices(q.T @ a @ q, q.T @ b, c @ q, blk(p, m))


def random_transform(n, rng, max_condition=1e3):
    """Random T = U diag(s) V^T with singular values in [1, sqrt(max_condition)]."""
    u = ortho_group.rvs(n, random_state=rng)
    v = ortho_group.rvs(n, random_state=rng)
    s = np.exp(rng.uniform(0, 0.5 * np.log(max_condition), size=n))
    return u @ np.diag(s) @ v.T


def max_response_gap(first, second, omegas):
    """Largest relative Frobenius difference of the transfer functions over a grid."""
    worst = 0.0
    for w in omegas:
        h1, h2 = transfer_at(first, w), transfer_at(second, w)
        worst = max(worst, np.linalg.norm(h1 - h2) / max(np.linalg.norm(h1), 1e-300))
    return worst


@pytest.fixture
def scalar_model():
    return StateSpaceModel.from_matrices([[-1.0]], [[1.0]], [[1.0]], [[0.0]])


@pytest.fixture
def decoupled_model():
    return StateSpaceModel.from_matrices(np.diag([-1.0, -2.0]), np.eye(2), np.eye(2))


@pytest.fixture
def random_stable_models():
    return [gen_example('random_stable', 10, {}, seed) for seed in range(10)]


@pytest.fixture
def log_grid():
    return np.logspace(-2, 2, 50)
