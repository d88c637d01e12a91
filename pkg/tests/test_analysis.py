import math

import numpy as np
import pytest

from baltrunc.analysis import (
    FrequencyResponse,
    Signal,
    frequency_grid,
    frequency_sweep,
    hinf_error_estimate,
    l2_norm,
    simulate,
    sinusoid_response,
    verify_bound,
)
from baltrunc.errors import DimensionMismatch, InvalidMatrix
from baltrunc.generators import gen_example
from baltrunc.gramians import infinite_gramians, output_energy
from baltrunc.reduction import ExplicitOrder, balance, balanced_truncation, truncate
from baltrunc.statespace import StateSpaceModel


def test_signal_rejects_bad_samples():
    with pytest.raises(InvalidMatrix):
        Signal(0.1, [[np.inf]])
    with pytest.raises(ValueError):
        Signal(0.0, [1.0, 2.0])


def test_simulate_zero_input(scalar_model):
    y, x_final = simulate(scalar_model, Signal(0.01, np.zeros(100)))
    assert not np.any(y.samples)
    assert x_final[0] == 0.0


def test_simulate_step_response(scalar_model):
    dt = 1e-3
    y, _ = simulate(scalar_model, Signal(dt, np.ones(2001)))
    assert y.samples[1000, 0] == pytest.approx(1 - math.exp(-1), abs=1e-6)


def test_simulate_free_response(scalar_model):
    y, x_final = simulate(scalar_model, Signal(1e-3, np.zeros(2001)), x0=[1.0])
    assert y.samples[2000, 0] == pytest.approx(math.exp(-2), abs=1e-6)
    assert x_final[0] == pytest.approx(math.exp(-2.001), abs=1e-9)


def test_simulate_is_exact_for_piecewise_constant_input():
    model = gen_example('random_stable', 5, {}, 1)
    rng = np.random.default_rng(0)
    levels = rng.standard_normal(50)
    coarse, _ = simulate(model, Signal(0.02, levels))
    fine, _ = simulate(model, Signal(0.01, np.repeat(levels, 2)))
    scale = np.max(np.abs(coarse.samples))
    assert np.max(np.abs(fine.samples[::2] - coarse.samples)) <= 1e-9 * scale


def test_simulate_static_model():
    model = StateSpaceModel.static([[2.0, -1.0]])
    y, x_final = simulate(model, Signal(0.1, [[1.0, 1.0], [2.0, 0.0]]))
    np.testing.assert_allclose(y.samples, [[1.0], [4.0]])
    assert x_final.size == 0


def test_simulate_checks_channels(scalar_model):
    with pytest.raises(DimensionMismatch):
        simulate(scalar_model, Signal(0.1, np.zeros((3, 2))))


def test_l2_norm_cases():
    assert l2_norm(Signal(0.1, np.zeros(10))) == 0.0
    t = 1e-3 * np.arange(40001)
    assert l2_norm(Signal(1e-3, np.exp(-t))) == pytest.approx(math.sqrt(0.5), abs=1e-4)
    assert l2_norm(Signal(1e-3, np.ones(4001))) == pytest.approx(2.0, abs=1e-6)


def test_free_response_energy_matches_observability_gramian(scalar_model):
    dt = 1e-3
    y, _ = simulate(scalar_model, Signal(dt, np.zeros(40001)), x0=[1.0])
    expected = output_energy(infinite_gramians(scalar_model), [1.0])
    assert l2_norm(y) ** 2 == pytest.approx(expected, rel=1e-2)


def test_frequency_sweep(scalar_model):
    response = frequency_sweep(scalar_model, 0.1, 10.0, 3)
    np.testing.assert_allclose(response.omegas, [0.1, 1.0, 10.0])
    assert response.amplitude()[1] == pytest.approx(1 / math.sqrt(2))
    assert response.phase()[1] == pytest.approx(-math.pi / 4)
    frame = response.to_frame()
    assert list(frame.columns) == ['omega', 'y1u1_re', 'y1u1_im', 'y1u1_mag']


def test_frequency_sweep_zero_coupling():
    model = StateSpaceModel.from_matrices(-np.eye(2), np.zeros((2, 1)), np.ones((1, 2)), [[0.5]])
    response = frequency_sweep(model, 0.0, 10.0, 20)
    assert response.omegas[0] == 0.0
    np.testing.assert_array_equal(response.values, np.full((21, 1, 1), 0.5 + 0j))


def test_frequency_grid_validation():
    with pytest.raises(ValueError):
        frequency_grid(1.0, 1.0, 10)
    grid = frequency_grid(0.0, 1e3, 10)
    assert grid[1] == pytest.approx(1e-3)


def test_frequency_response_requires_ascending_grid():
    with pytest.raises(ValueError):
        FrequencyResponse(np.array([1.0, 1.0]), np.zeros((2, 1, 1), dtype=complex))


def test_sinusoid_response(scalar_model):
    amplitude, phase = sinusoid_response(scalar_model, 1.0)
    assert amplitude == pytest.approx(1 / math.sqrt(2))
    assert phase == pytest.approx(-math.pi / 4)


def test_hinf_error_decoupled(decoupled_model):
    reduced, report = truncate(balance(decoupled_model), 1)
    estimate, omega = hinf_error_estimate(decoupled_model, reduced, 1e-3, 1e3)
    assert estimate == pytest.approx(0.5, abs=1e-8)
    assert omega == pytest.approx(0.0, abs=1e-3)
    assert report.lower_bound <= estimate <= report.upper_bound * (1 + 1e-6)


def test_hinf_error_sees_feedthrough():
    full = StateSpaceModel.from_matrices([[-1.0]], [[1.0]], [[1.0]], [[2.0]])
    reduced = StateSpaceModel.static([[0.0]])
    estimate, omega = hinf_error_estimate(full, reduced, 1e-2, 1e2)
    assert estimate == pytest.approx(3.0)
    assert omega == pytest.approx(0.0, abs=1e-3)


def test_verify_decoupled_passes(decoupled_model):
    reduced, report, _ = balanced_truncation(decoupled_model, ExplicitOrder(1))
    result = verify_bound(decoupled_model, reduced, report, trials=2, seed=3)
    assert result.passed
    assert result.freq_error_estimate == pytest.approx(0.5, abs=1e-8)
    assert result.worst_time_ratio <= report.upper_bound


def test_verify_is_reproducible_across_workers():
    model = gen_example('random_stable', 4, {}, 2)
    reduced, report, _ = balanced_truncation(model, ExplicitOrder(2))
    sequential = verify_bound(model, reduced, report, trials=3, seed=11, max_steps=20_000)
    threaded = verify_bound(model, reduced, report, trials=3, seed=11, workers=3, max_steps=20_000)
    assert sequential.trial_ratios == threaded.trial_ratios


def test_error_bounds_hold_on_random_systems():
    above_lower = 0
    cases = 30
    for seed in range(cases):
        model = gen_example('random_stable', 10, {}, 100 + seed)
        reduced, report, _ = balanced_truncation(model, ExplicitOrder(4))
        estimate, _ = hinf_error_estimate(model, reduced, 1e-3 * 0.5, 1e3 * 0.5)
        assert estimate <= report.upper_bound * (1 + 1e-6) + 1e-10
        if estimate >= 0.98 * report.lower_bound:
            above_lower += 1
    assert above_lower >= math.floor(0.95 * cases)


def test_time_domain_trials_respect_upper_bound():
    for seed in range(3):
        model = gen_example('random_stable', 10, {}, 200 + seed)
        reduced, report, _ = balanced_truncation(model, ExplicitOrder(4))
        result = verify_bound(model, reduced, report, trials=1, seed=seed, max_steps=20_000)
        assert result.passed
        assert all(ratio <= report.upper_bound for ratio in result.trial_ratios)
