"""State-space models, similarity transforms, stability and H(iw)."""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import DimensionMismatch, ModelValidationError, Resonance, SingularMatrix

logger = logging.getLogger(__name__)


def _frozen(value, dtype=float):
    arr = np.array(value, dtype=dtype)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """LTI model x' = Ax + Bu, y = Cx + Du.

    Matrices are stored as read-only float64 arrays. The constructor only
    coerces; use validate() or StateSpaceModel.checked() for the invariants.
    """
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        for name in ('a', 'b', 'c', 'd'):
            value = getattr(self, name)
            if not (isinstance(value, np.ndarray) and not value.flags.writeable
                    and value.dtype == float):
                object.__setattr__(self, name, _frozen(value))

    @classmethod
    def from_matrices(cls, a, b, c, d=None, label=None):
        """Build a model, defaulting D to zeros, and enforce the invariants."""
        b_arr = np.atleast_2d(np.asarray(b, dtype=float))
        c_arr = np.atleast_2d(np.asarray(c, dtype=float))
        if d is None:
            d = np.zeros((c_arr.shape[0], b_arr.shape[1]))
        return cls.checked(a, b_arr, c_arr, d, label=label)

    @classmethod
    def checked(cls, a, b, c, d, label=None):
        model = cls(a, b, c, d, label=label)
        violations = validate(model)
        if violations:
            raise ModelValidationError(violations)
        return model

    @classmethod
    def static(cls, d, label=None):
        """Order-0 model carrying only the feed-through D."""
        d = _frozen(d)
        p, m = d.shape
        return cls(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((p, 0)), d, label=label)

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def m(self):
        return self.b.shape[1]

    @property
    def p(self):
        return self.c.shape[0]

    @property
    def order(self):
        return self.n

    @property
    def dims(self):
        return self.n, self.m, self.p

    def scale(self):
        """Max Frobenius norm of A, B and C."""
        return max(float(np.linalg.norm(x)) if x.size else 0.0 for x in (self.a, self.b, self.c))

    def dual(self):
        return StateSpaceModel(self.a.T, self.c.T, self.b.T, self.d.T, label=self.label)

    def with_label(self, label):
        return StateSpaceModel(self.a, self.b, self.c, self.d, label=label)

    def __repr__(self):
        return f"StateSpaceModel(n={self.n}, m={self.m}, p={self.p}, label={self.label!r})"


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    """Change of state basis z = T x, stored together with T^-1."""
    t: np.ndarray
    t_inv: np.ndarray
    condition_estimate: float = field(default=1.0)

    def __post_init__(self):
        object.__setattr__(self, 't', _frozen(self.t))
        object.__setattr__(self, 't_inv', _frozen(self.t_inv))
        n = self.t.shape[0]
        if self.t.shape != (n, n) or self.t_inv.shape != (n, n):
            raise DimensionMismatch(
                f"Transform blocks must be square and equal, got {self.t.shape} and {self.t_inv.shape}")
        residual = self.residual()
        if residual > 1e-8 * max(n, 1):
            logger.warning(f"Similarity transform residual |T T^-1 - I|_F = {residual:.3e} "
                           f"(condition estimate {self.condition_estimate:.3e})")

    @classmethod
    def from_matrix(cls, t):
        t = linalg.as_matrix(t, "t")
        n = t.shape[0]
        t_inv = linalg.solve(t, np.eye(n))
        return cls(t, t_inv, float(np.linalg.cond(t)) if n else 1.0)

    @classmethod
    def orthogonal(cls, q):
        q = linalg.as_matrix(q, "q")
        return cls(q.T, q, 1.0)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n), np.eye(n), 1.0)

    @property
    def n(self):
        return self.t.shape[0]

    def residual(self):
        n = self.t.shape[0]
        if n == 0:
            return 0.0
        return float(np.linalg.norm(self.t @ self.t_inv - np.eye(n)))

    def is_identity(self):
        eye = np.eye(self.n)
        return np.array_equal(self.t, eye) and np.array_equal(self.t_inv, eye)

    def then(self, other):
        """Compose: apply self first, then other."""
        return SimilarityTransform(other.t @ self.t, self.t_inv @ other.t_inv,
                                   self.condition_estimate * other.condition_estimate)


def validate(model):
    """Return the list of broken invariants; empty when the model is well formed."""
    violations = []
    for name in ('a', 'b', 'c', 'd'):
        value = np.asarray(getattr(model, name))
        if value.ndim != 2:
            violations.append(f"{name}: must be 2-D, got shape {value.shape}")
        elif not np.all(np.isfinite(value)):
            violations.append(f"{name}: has non-finite entries")
    if violations:
        return violations

    a, b, c, d = model.a, model.b, model.c, model.d
    n = a.shape[0]
    if a.shape[1] != n:
        violations.append(f"a: must be square, got {a.shape[0]}x{a.shape[1]}")
    if b.shape[0] != n:
        violations.append(f"b: must have {n} rows, got {b.shape[0]}")
    if b.shape[1] < 1:
        violations.append("b: must have at least one column")
    if c.shape[1] != n:
        violations.append(f"c: must have {n} columns, got {c.shape[1]}")
    if c.shape[0] < 1:
        violations.append("c: must have at least one row")
    if d.shape != (c.shape[0], b.shape[1]):
        violations.append(f"d: must be {c.shape[0]}x{b.shape[1]}, got {d.shape[0]}x{d.shape[1]}")
    return violations


def apply_similarity(model, t):
    """Return (T A T^-1, T B, C T^-1, D); D is passed through untouched."""
    if t.n != model.n:
        raise DimensionMismatch(f"Transform is {t.n}x{t.n} but model order is {model.n}")
    if t.is_identity():
        return model
    return StateSpaceModel(t.t @ model.a @ t.t_inv, t.t @ model.b, model.c @ t.t_inv,
                           model.d, label=model.label)


def spectral_abscissa(model):
    if model.n == 0:
        return -np.inf
    return float(np.max(linalg.eigenvalues(model.a).real))


def is_stable(model, margin=0.0):
    """(stable, spectral abscissa); stable iff max Re(lambda) < -margin."""
    if margin < 0:
        raise ValueError(f"margin must be non-negative, got {margin}")
    abscissa = spectral_abscissa(model)
    return bool(abscissa < -margin), abscissa


def transfer_at(model, omega):
    """H(iw) = C (iwI - A)^-1 B + D as a p x m complex array."""
    d = model.d.astype(complex)
    if model.n == 0 or not np.any(model.b):
        return d
    resolvent = 1j * omega * np.eye(model.n) - model.a
    try:
        x = linalg.solve(resolvent, model.b.astype(complex))
    except SingularMatrix as e:
        raise Resonance(f"iwI - A is singular at omega={omega!r}", omega=omega) from e
    return model.c @ x + d
