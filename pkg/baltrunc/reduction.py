"""Balancing, Hankel singular values, order selection and truncation."""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from . import linalg
from .config import (
    DEFAULT_CHOLESKY_SHIFT_TOL,
    DEFAULT_DEDUP_TOL,
    DEFAULT_GAP_TOL,
    DEFAULT_HSV_FLOOR,
)
from .errors import NoValidGap, NotPositiveDefinite, UnstableSystem
from .gramians import infinite_gramians
from .realization import minimal_realization
from .statespace import SimilarityTransform, StateSpaceModel, apply_similarity, is_stable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplicitOrder:
    r: int


@dataclass(frozen=True)
class ErrorBudget:
    """Smallest order whose upper error bound stays within eps."""
    eps: float


@dataclass(frozen=True)
class RelativeFloor:
    """Keep every HSV with h_i >= rho * h_1."""
    rho: float


OrderCriterion = Union[ExplicitOrder, ErrorBudget, RelativeFloor]


@dataclass(frozen=True)
class ReductionOptions:
    rank_tol: Optional[float] = None
    gap_tol: float = DEFAULT_GAP_TOL
    dedup_tol: float = DEFAULT_DEDUP_TOL
    hsv_floor: float = DEFAULT_HSV_FLOOR
    shift_tol: float = DEFAULT_CHOLESKY_SHIFT_TOL


@dataclass(frozen=True, eq=False)
class BalancedRealization:
    model: StateSpaceModel
    transform: SimilarityTransform
    hsv: np.ndarray
    floor_clamped: int = 0

    @property
    def n(self):
        return self.model.n


@dataclass
class ReductionReport:
    original_order: int
    reduced_order: int
    hsv_kept: list
    hsv_truncated: list
    distinct_truncated: list
    lower_bound: float
    upper_bound: float
    gap_ratio: float
    minimal_order: Optional[int] = None
    criterion: Optional[str] = field(default=None)

    def to_dict(self):
        data = asdict(self)
        data['gap_ratio'] = self.gap_ratio if math.isfinite(self.gap_ratio) else None
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        gap = data.get('gap_ratio')
        data['gap_ratio'] = math.inf if gap is None else float(gap)
        for key in ('original_order', 'reduced_order'):
            data[key] = int(data[key])
        if data.get('minimal_order') is not None:
            data['minimal_order'] = int(data['minimal_order'])
        for key in ('hsv_kept', 'hsv_truncated', 'distinct_truncated'):
            data[key] = [float(v) for v in data[key]]
        for key in ('lower_bound', 'upper_bound'):
            data[key] = float(data[key])
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in data.items() if k in known})


def distinct_values(values, rel_tol=DEFAULT_DEDUP_TOL):
    """Merge descending values that agree within rel_tol, keeping the largest of each cluster."""
    distinct = []
    for value in sorted((float(v) for v in values), reverse=True):
        if distinct and distinct[-1] - value <= rel_tol * distinct[-1]:
            continue
        distinct.append(value)
    return distinct


def error_bound_curve(hsv, dedup_tol=DEFAULT_DEDUP_TOL):
    """Upper bound 2 * sum of distinct truncated HSVs for every order r = 0..n."""
    hsv = np.asarray(hsv, dtype=float)
    return np.array([2.0 * sum(distinct_values(hsv[r:], dedup_tol)) for r in range(hsv.size + 1)])


def _has_gap(hsv, r, gap_tol):
    return r == hsv.size or hsv[r - 1] > (1.0 + gap_tol) * hsv[r]


def _cluster_around(hsv, r, gap_tol):
    lo = r - 1
    while lo > 0 and not _has_gap(hsv, lo, gap_tol):
        lo -= 1
    hi = r
    while hi + 1 < hsv.size and not _has_gap(hsv, hi + 1, gap_tol):
        hi += 1
    return [float(v) for v in hsv[lo:hi + 1]]


def select_order(hsv, criterion, gap_tol=DEFAULT_GAP_TOL, dedup_tol=DEFAULT_DEDUP_TOL):
    """Pick the reduced order for a descending HSV list.

    The order the criterion asks for is moved down to the nearest r with
    h_r / h_(r+1) > 1 + gap_tol; r = n always qualifies.

    Raises:
        NoValidGap: no order in [1, requested] sits on a strict gap.
    """
    hsv = np.asarray(hsv, dtype=float)
    n = hsv.size
    if n == 0:
        raise ValueError("Cannot select an order for an empty HSV list")

    if isinstance(criterion, ExplicitOrder):
        if criterion.r < 1:
            raise ValueError(f"Requested order must be at least 1, got {criterion.r}")
        requested = min(int(criterion.r), n)
    elif isinstance(criterion, ErrorBudget):
        if criterion.eps < 0:
            raise ValueError(f"Error budget must be non-negative, got {criterion.eps}")
        bounds = error_bound_curve(hsv, dedup_tol)
        requested = next(r for r in range(1, n + 1) if bounds[r] <= criterion.eps)
    elif isinstance(criterion, RelativeFloor):
        if not 0 < criterion.rho <= 1:
            raise ValueError(f"Relative floor must lie in (0, 1], got {criterion.rho}")
        requested = max(1, int(np.count_nonzero(hsv >= criterion.rho * hsv[0])))
    else:
        raise TypeError(f"Unknown order criterion {criterion!r}")

    r = requested
    while r >= 1 and not _has_gap(hsv, r, gap_tol):
        r -= 1
    if r < 1:
        cluster = _cluster_around(hsv, requested, gap_tol)
        raise NoValidGap(f"No strict HSV gap at or below order {requested}; cluster {cluster}",
                         cluster=cluster)
    if r != requested:
        logger.info(f"Order {requested} splits an HSV cluster; moved down to {r}")
    return r


def _square_root_factor(gramian, name, shift_tol):
    """Cholesky factor, or the clipped eigenvalue factor when rounding leaves negative pivots."""
    try:
        result = linalg.cholesky(gramian, shift_tol)
    except NotPositiveDefinite as e:
        logger.debug(f"Cholesky of the {name} gramian failed ({e}); using the eigenvalue factor")
        result = linalg.psd_factor(gramian)
    if result.clamped:
        logger.warning(f"The {name} gramian is numerically semidefinite "
                       f"({result.clamped} clamped pivots)")
    return result.factor


def _gramian_factors(model, shift_tol):
    gramians = infinite_gramians(model)
    factors = []
    for name, gramian in (("controllability", gramians.xc), ("observability", gramians.yo)):
        if not np.any(gramian):
            raise NotPositiveDefinite(f"The {name} gramian is zero; the model is not minimal")
        factors.append(_square_root_factor(gramian, name, shift_tol))
    return gramians, factors[0], factors[1]


def _clamp_floor(s, hsv_floor):
    floor = hsv_floor * s[0]
    low = s < floor
    clamped = int(np.count_nonzero(low))
    if clamped:
        logger.warning(f"{clamped} Hankel singular values below {floor:.3e} clamped to the floor; "
                       f"the model is close to non-minimal, consider a larger rank tolerance")
        s = np.where(low, floor, s)
    return s, clamped


def hankel_singular_values(model, hsv_floor=DEFAULT_HSV_FLOOR, shift_tol=DEFAULT_CHOLESKY_SHIFT_TOL):
    """Descending HSVs, the singular values of Lo^T Lc."""
    if model.n == 0:
        return np.zeros(0)
    stable, abscissa = is_stable(model)
    if not stable:
        raise UnstableSystem(f"HSVs need a stable model (spectral abscissa {abscissa:.6g})",
                             abscissa=abscissa)
    gramians = infinite_gramians(model)
    if not np.any(gramians.xc) or not np.any(gramians.yo):
        logger.warning("A gramian is identically zero; all HSVs are zero")
        return np.zeros(model.n)
    lc = _square_root_factor(gramians.xc, "controllability", shift_tol)
    lo = _square_root_factor(gramians.yo, "observability", shift_tol)
    s = linalg.svd(lo.T @ lc).s
    return _clamp_floor(s, hsv_floor)[0]


def balance(model, hsv_floor=DEFAULT_HSV_FLOOR, shift_tol=DEFAULT_CHOLESKY_SHIFT_TOL):
    """Square-root balancing of a stable minimal model.

    With Xc = Lc Lc^T, Yo = Lo Lo^T and Lo^T Lc = U S V^T:
    T = S^-1/2 U^T Lo^T and T^-1 = Lc V S^-1/2.
    """
    stable, abscissa = is_stable(model)
    if not stable:
        raise UnstableSystem(f"Balancing needs a stable model (spectral abscissa {abscissa:.6g})",
                             abscissa=abscissa)
    _, lc, lo = _gramian_factors(model, shift_tol)
    u, s, v = linalg.svd(lo.T @ lc)
    s, clamped = _clamp_floor(s, hsv_floor)
    root = 1.0 / np.sqrt(s)
    t = (root[:, None] * u.T) @ lo.T
    t_inv = (lc @ v) * root[None, :]
    transform = SimilarityTransform(t, t_inv, float(np.linalg.cond(t)))
    balanced = apply_similarity(model, transform)
    logger.info(f"Balanced order-{model.n} model; h1={s[0]:.6g}, hn={s[-1]:.6g}")
    return BalancedRealization(balanced, transform, s, clamped)


def truncate(balanced, r, gap_tol=DEFAULT_GAP_TOL, dedup_tol=DEFAULT_DEDUP_TOL):
    """Keep the leading r balanced states and report the error bounds.

    Returns:
        (reduced model, ReductionReport)
    """
    hsv = np.asarray(balanced.hsv, dtype=float)
    n = hsv.size
    if not 1 <= r <= n:
        raise ValueError(f"Order must lie in [1, {n}], got {r}")
    if not _has_gap(hsv, r, gap_tol):
        cluster = _cluster_around(hsv, r, gap_tol)
        raise NoValidGap(f"h_{r} / h_{r + 1} = {hsv[r - 1] / hsv[r]:.12g} is not a strict gap",
                         cluster=cluster)

    truncated = [float(v) for v in hsv[r:]]
    distinct = distinct_values(truncated, dedup_tol)
    report = ReductionReport(
        original_order=n,
        reduced_order=r,
        hsv_kept=[float(v) for v in hsv[:r]],
        hsv_truncated=truncated,
        distinct_truncated=distinct,
        lower_bound=distinct[0] if distinct else 0.0,
        upper_bound=2.0 * sum(distinct),
        gap_ratio=float(hsv[r - 1] / hsv[r]) if r < n else math.inf,
        minimal_order=n,
    )
    if r == n:
        return balanced.model, report

    full = balanced.model
    reduced = StateSpaceModel(full.a[:r, :r], full.b[:r, :], full.c[:, :r], full.d, label=full.label)
    logger.info(f"Truncated order {n} -> {r}; error bounds [{report.lower_bound:.6g}, "
                f"{report.upper_bound:.6g}]")
    return reduced, report


def balanced_truncation(model, criterion, options=None):
    """Minimal realization, balancing, order selection and truncation.

    Returns:
        (reduced model, ReductionReport, KalmanDecomposition)
    """
    options = options or ReductionOptions()
    minimal, decomposition = minimal_realization(model, options.rank_tol)
    if minimal.n == 0:
        report = ReductionReport(model.n, 0, [], [], [], 0.0, 0.0, math.inf,
                                 minimal_order=0, criterion=repr(criterion))
        return minimal, report, decomposition
    stable, abscissa = is_stable(minimal)
    if not stable:
        logger.error(f"Minimal realization is unstable (spectral abscissa {abscissa:.6g})")
        raise UnstableSystem(f"Balanced truncation needs a stable model "
                             f"(spectral abscissa {abscissa:.6g})", abscissa=abscissa)

    balanced = balance(minimal, options.hsv_floor, options.shift_tol)
    r = select_order(balanced.hsv, criterion, options.gap_tol, options.dedup_tol)
    reduced, report = truncate(balanced, r, options.gap_tol, options.dedup_tol)
    report.original_order = model.n
    report.minimal_order = minimal.n
    report.criterion = repr(criterion)
    return reduced, report, decomposition
