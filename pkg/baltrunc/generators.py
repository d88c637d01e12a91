"""Example systems for demos and tests."""
import logging

import numpy as np

from . import linalg
from .errors import UnknownExampleKind
from .statespace import StateSpaceModel

logger = logging.getLogger(__name__)


def _chain_laplacian(k):
    """Tridiagonal [-1, 2, -1] with the last diagonal entry 1 (grounded at node 1, free at node k)."""
    lap = 2.0 * np.eye(k) - np.eye(k, k=1) - np.eye(k, k=-1)
    lap[-1, -1] = 1.0
    return lap


def _positive(params, name, default):
    value = float(params.get(name, default))
    if not value > 0:
        raise ValueError(f"Parameter '{name}' must be positive, got {value}")
    return value


def random_stable(size, params, seed):
    """A = G - (max Re lambda(G) + shift) I, so the spectral abscissa is -shift.

    G is shifted by its spectral abscissa, not its spectral radius rho(G);
    shifting by rho(G) would leave the abscissa anywhere in [-2 rho(G) - shift, -shift].
    """
    shift = _positive(params, 'shift', 0.5)
    m = int(params.get('inputs', 1))
    p = int(params.get('outputs', 1))
    if m < 1 or p < 1:
        raise ValueError(f"inputs and outputs must be at least 1, got {m} and {p}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, size))
    abscissa = float(np.max(linalg.eigenvalues(g).real))
    a = g - (abscissa + shift) * np.eye(size)
    b = rng.standard_normal((size, m))
    c = rng.standard_normal((p, size))
    return StateSpaceModel.from_matrices(a, b, c, label=f"random_stable(n={size}, seed={seed})")


def mass_spring_chain(size, params, seed=None):
    """k masses in a line, spring and damper between neighbours and from mass 1 to the wall.

    State is (positions, velocities); force on mass 1 in, position of mass k out.
    """
    mass = _positive(params, 'mass', 1.0)
    stiffness = _positive(params, 'stiffness', 1.0)
    damping = _positive(params, 'damping', 0.1)
    k = size
    lap = _chain_laplacian(k)
    zero, eye = np.zeros((k, k)), np.eye(k)
    a = np.block([[zero, eye],
                  [-stiffness / mass * lap, -damping / mass * lap]])
    b = np.zeros((2 * k, 1))
    b[k, 0] = 1.0 / mass
    c = np.zeros((1, 2 * k))
    c[0, k - 1] = 1.0
    return StateSpaceModel.from_matrices(a, b, c, label=f"mass_spring_chain(k={k})")


def rc_ladder(size, params, seed=None):
    """k-section RC ladder driven by a voltage source; output is the last node voltage."""
    resistance = _positive(params, 'R', 1.0)
    capacitance = _positive(params, 'C', 1.0)
    k = size
    tau = resistance * capacitance
    a = -_chain_laplacian(k) / tau
    b = np.zeros((k, 1))
    b[0, 0] = 1.0 / tau
    c = np.zeros((1, k))
    c[0, -1] = 1.0
    return StateSpaceModel.from_matrices(a, b, c, label=f"rc_ladder(k={k})")


EXAMPLES = {
    'random_stable': random_stable,
    'mass_spring_chain': mass_spring_chain,
    'rc_ladder': rc_ladder,
}


def gen_example(kind, size, params=None, seed=0):
    """Build one of the example families.

    Args:
        kind: 'random_stable', 'mass_spring_chain' or 'rc_ladder'
        size: order for random_stable, number of masses or sections otherwise
        params: family parameters (shift, inputs, outputs / mass, stiffness,
            damping / R, C)
        seed: only used by random_stable
    """
    builder = EXAMPLES.get(kind)
    if builder is None:
        raise UnknownExampleKind(f"Unknown example kind {kind!r}; choose from {', '.join(EXAMPLES)}")
    if int(size) < 1:
        raise ValueError(f"size must be at least 1, got {size}")
    model = builder(int(size), dict(params or {}), seed)
    logger.info(f"Generated {model.label}: n={model.n}, m={model.m}, p={model.p}")
    return model
