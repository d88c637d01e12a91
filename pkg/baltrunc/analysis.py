"""Time-domain simulation, signal norms, frequency sweeps and error-bound checks."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.integrate
import scipy.signal
from scipy.signal import windows

from . import linalg
from .errors import DimensionMismatch, InvalidMatrix, UnstableSystem
from .statespace import spectral_abscissa, transfer_at

logger = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled signal, samples shaped (num_steps, channels)."""
    dt: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise InvalidMatrix(f"Signal samples must be (steps, channels), got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidMatrix("Signal samples must be finite")
        if not self.dt > 0:
            raise ValueError(f"Signal dt must be positive, got {self.dt}")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    @property
    def channels(self):
        return self.samples.shape[1]

    @property
    def num_steps(self):
        return self.samples.shape[0]

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.num_steps)


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("Frequency grid must be strictly ascending")
        if len(self.values) != len(self.omegas):
            raise DimensionMismatch(f"{len(self.values)} responses for {len(self.omegas)} frequencies")

    def magnitude(self):
        return np.abs(self.values)

    def amplitude(self, output=0, input=0):
        """Steady-state amplitude A_w for a sinusoid on one input channel."""
        return np.abs(self.values[:, output, input])

    def phase(self, output=0, input=0):
        """Unwrapped phase shift phi_w in radians."""
        return np.unwrap(np.angle(self.values[:, output, input]))

    def to_frame(self):
        """omega column, then real, imag and magnitude per (output, input) channel."""
        columns = {'omega': self.omegas}
        _, p, m = self.values.shape
        for i in range(p):
            for j in range(m):
                h = self.values[:, i, j]
                columns[f'y{i + 1}u{j + 1}_re'] = h.real
                columns[f'y{i + 1}u{j + 1}_im'] = h.imag
                columns[f'y{i + 1}u{j + 1}_mag'] = np.abs(h)
        return pd.DataFrame(columns)


@dataclass
class BoundVerification:
    lower_bound: float
    upper_bound: float
    freq_error_estimate: float
    worst_time_ratio: float
    num_trials: int
    passed: bool
    argmax_omega: float = 0.0
    trial_ratios: list = field(default_factory=list)

    def to_dict(self):
        return {
            'lower_bound': self.lower_bound,
            'upper_bound': self.upper_bound,
            'freq_error_estimate': self.freq_error_estimate,
            'argmax_omega': self.argmax_omega,
            'worst_time_ratio': self.worst_time_ratio,
            'num_trials': self.num_trials,
            'passed': self.passed,
        }


def _zoh_matrices(model, dt):
    n, m = model.n, model.m
    block = np.zeros((n + m, n + m))
    block[:n, :n] = model.a
    block[:n, n:] = model.b
    exp_block = linalg.expm(block * dt)
    return exp_block[:n, :n], exp_block[:n, n:]


def simulate(model, u, x0=None):
    """Exact zero-order-hold simulation.

    Outputs are sampled as C x + D u at the start of each step.

    Returns:
        (output Signal, state after the last step)
    """
    if u.channels != model.m:
        raise DimensionMismatch(f"Input has {u.channels} channels, model has {model.m} inputs")
    n = model.n
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != n:
        raise DimensionMismatch(f"Initial state has length {x0.shape[0]}, model order is {n}")

    samples = u.samples
    if n == 0:
        return Signal(u.dt, samples @ model.d.T, u.t0), x0

    ad, bd = _zoh_matrices(model, u.dt)
    if u.num_steps == 1:
        states = x0[None, :]
        outputs = states @ model.c.T + samples @ model.d.T
    else:
        _, outputs, states = scipy.signal.dlsim((ad, bd, model.c, model.d, u.dt), samples, x0=x0)
        outputs = np.asarray(outputs).reshape(u.num_steps, model.p)
        states = np.asarray(states).reshape(u.num_steps, n)
    x_final = ad @ states[-1] + bd @ samples[-1]
    return Signal(u.dt, outputs, u.t0), x_final


def l2_norm(s):
    """Trapezoid-rule L2 norm over the signal's support."""
    if s.num_steps < 2:
        return 0.0
    energy = scipy.integrate.trapezoid(np.sum(s.samples ** 2, axis=1), dx=s.dt)
    return float(np.sqrt(max(energy, 0.0)))


def frequency_grid(w_min, w_max, points):
    """Log-spaced grid; w = 0 is prepended when w_min is 0."""
    if not 0 <= w_min < w_max:
        raise ValueError(f"Need 0 <= w_min < w_max, got {w_min}, {w_max}")
    if points < 2:
        raise ValueError(f"Need at least 2 points, got {points}")
    if w_min == 0:
        return np.concatenate([[0.0], np.logspace(math.log10(w_max) - 6, math.log10(w_max), points)])
    return np.logspace(math.log10(w_min), math.log10(w_max), points)


def frequency_sweep(model, w_min, w_max, points):
    omegas = frequency_grid(w_min, w_max, points)
    values = np.array([transfer_at(model, w) for w in omegas])
    return FrequencyResponse(omegas, values)


def sinusoid_response(model, omega, output=0, input=0):
    """Amplitude and phase of the steady-state response to sin(w t)."""
    h = transfer_at(model, omega)[output, input]
    return float(abs(h)), float(np.angle(h))


def _largest_singular_value(h):
    if h.size == 0:
        return 0.0
    return float(np.linalg.norm(h, 2))


def hinf_error_estimate(full, reduced, w_min, w_max, points=400, refine_iters=20):
    """Lower estimate of sup_w sigma_max(H_full(iw) - H_reduced(iw)).

    Scans a log grid (plus w = 0 and the feed-through limit w -> inf), then
    refines around the grid maximum with golden-section steps. The true
    supremum can only be larger.

    Returns:
        (estimate, argmax_omega)
    """
    if (full.m, full.p) != (reduced.m, reduced.p):
        raise DimensionMismatch(f"Models have different shapes: {full.p}x{full.m} and {reduced.p}x{reduced.m}")

    def error_at(w):
        return _largest_singular_value(transfer_at(full, w) - transfer_at(reduced, w))

    grid = frequency_grid(w_min, w_max, points)
    if grid[0] != 0.0:
        grid = np.concatenate([[0.0], grid])
    errors = np.array([error_at(w) for w in grid])
    k = int(np.argmax(errors))
    best, best_w = float(errors[k]), float(grid[k])

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    if refine_iters > 0 and hi > lo:
        x1 = hi - GOLDEN * (hi - lo)
        x2 = lo + GOLDEN * (hi - lo)
        f1, f2 = error_at(x1), error_at(x2)
        for _ in range(refine_iters):
            if f1 > f2:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - GOLDEN * (hi - lo)
                f1 = error_at(x1)
            else:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + GOLDEN * (hi - lo)
                f2 = error_at(x2)
            for w, f in ((x1, f1), (x2, f2)):
                if f > best:
                    best, best_w = f, float(w)

    at_infinity = _largest_singular_value(full.d - reduced.d)
    if at_infinity > best:
        best, best_w = at_infinity, math.inf
    logger.debug(f"H-infinity error estimate {best:.6g} at omega={best_w:.6g}")
    return best, best_w


def _trial_input(rng, m, num_steps, dt, w_lo, w_hi):
    """Windowed sum of at most 10 sinusoids with log-uniform frequencies."""
    count = int(rng.integers(1, 11))
    nyquist = math.pi / dt
    top = min(w_hi, nyquist / 4)
    bottom = min(w_lo, top / 10)
    freqs = np.exp(rng.uniform(math.log(bottom), math.log(top), size=count))
    amplitudes = rng.standard_normal((count, m))
    phases = rng.uniform(0.0, 2 * math.pi, size=(count, m))
    t = dt * np.arange(num_steps)
    u = np.zeros((num_steps, m))
    for k in range(count):
        u += amplitudes[k] * np.sin(freqs[k] * t[:, None] + phases[k])
    return u * windows.tukey(num_steps, alpha=0.5)[:, None]


def _time_ratio(full, reduced, samples, dt):
    u = Signal(dt, samples)
    u_norm = l2_norm(u)
    if u_norm == 0.0:
        return 0.0
    y_full, _ = simulate(full, u)
    y_reduced, _ = simulate(reduced, u)
    error = Signal(dt, y_reduced.samples - y_full.samples)
    return l2_norm(error) / u_norm


def verify_bound(full, reduced, report, trials=5, seed=0, workers=None, max_steps=200_000):
    """Check measured truncation errors against the report's bounds.

    The frequency-domain estimate and the time-domain ratios are both lower
    estimates of the worst-case gain; each must stay below the upper bound.
    Trials are independent and seeded per trial, so running them on a
    thread pool gives the same result as running them in order.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if (full.m, full.p) != (reduced.m, reduced.p):
        raise DimensionMismatch(f"Models have different shapes: {full.p}x{full.m} and {reduced.p}x{reduced.m}")

    abscissas = [spectral_abscissa(model) for model in (full, reduced)]
    for abscissa in abscissas:
        if abscissa >= 0:
            raise UnstableSystem(f"Bound verification needs stable models (spectral abscissa {abscissa:.6g})",
                                 abscissa=abscissa)
    finite = [-a for a in abscissas if math.isfinite(a)]
    rate = min(finite) if finite else 1.0

    w_lo, w_hi = 1e-3 * rate, 1e3 * rate
    freq_estimate, argmax_omega = hinf_error_estimate(full, reduced, w_lo, w_hi, 400, 20)

    fastest = max([rate] + [float(np.max(np.abs(linalg.eigenvalues(model.a))))
                            for model in (full, reduced) if model.n])
    horizon = 80.0 / rate
    dt = 1.0 / (50.0 * fastest)
    num_steps = int(math.ceil(horizon / dt)) + 1
    if num_steps > max_steps:
        logger.warning(f"Time grid of {num_steps} steps capped at {max_steps}")
        num_steps = max_steps
        dt = horizon / (num_steps - 1)

    seeds = np.random.SeedSequence(seed).spawn(trials)

    def run_trial(child):
        rng = np.random.default_rng(child)
        samples = _trial_input(rng, full.m, num_steps, dt, w_lo, w_hi)
        return _time_ratio(full, reduced, samples, dt)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ratios = list(pool.map(run_trial, seeds))
    else:
        ratios = [run_trial(child) for child in seeds]

    worst = max(ratios)
    limit = report.upper_bound * (1 + 1e-6) + 1e-10
    passed = bool(worst <= limit and freq_estimate <= limit)
    if passed:
        logger.info(f"Bound verified: lower {report.lower_bound:.6g} <= estimate {freq_estimate:.6g} "
                    f"<= upper {report.upper_bound:.6g}; worst time ratio {worst:.6g}")
    else:
        logger.error(f"Bound violated: estimate {freq_estimate:.6g}, worst time ratio {worst:.6g}, "
                     f"upper bound {report.upper_bound:.6g}")
    return BoundVerification(
        lower_bound=report.lower_bound,
        upper_bound=report.upper_bound,
        freq_error_estimate=freq_estimate,
        worst_time_ratio=float(worst),
        num_trials=trials,
        passed=passed,
        argmax_omega=argmax_omega,
        trial_ratios=[float(r) for r in ratios],
    )
