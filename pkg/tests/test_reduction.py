import math

import numpy as np
import pytest
from scipy.linalg import block_diag

from baltrunc.errors import NoValidGap, UnstableSystem
from baltrunc.generators import gen_example
from baltrunc.gramians import infinite_gramians
from baltrunc.realization import minimal_realization
from baltrunc.reduction import (
    ErrorBudget,
    ExplicitOrder,
    RelativeFloor,
    ReductionReport,
    balance,
    balanced_truncation,
    distinct_values,
    error_bound_curve,
    hankel_singular_values,
    select_order,
    truncate,
)
from baltrunc.statespace import SimilarityTransform, StateSpaceModel, apply_similarity, is_stable, transfer_at

from conftest import balanced_diagonal, balanced_siso, max_response_gap, planted_kalman, random_transform


def test_hsv_closed_forms(scalar_model, decoupled_model):
    np.testing.assert_allclose(hankel_singular_values(scalar_model), [0.5], atol=1e-12)
    np.testing.assert_allclose(hankel_singular_values(decoupled_model), [0.5, 0.25], atol=1e-12)


def test_hsv_similarity_invariance():
    rng = np.random.default_rng(8)
    for seed in range(20):
        model = gen_example('random_stable', 10, {}, seed)
        t = SimilarityTransform.from_matrix(random_transform(10, rng))
        hsv = hankel_singular_values(model)
        moved = hankel_singular_values(apply_similarity(model, t))
        assert np.max(np.abs(moved - hsv) / hsv) <= 1e-7


def test_balanced_gramians_equal_diag_hsv():
    for seed in range(20):
        balanced = balance(gen_example('random_stable', 10, {}, seed))
        pair = infinite_gramians(balanced.model)
        sigma = np.diag(balanced.hsv)
        assert np.linalg.norm(pair.xc - sigma) <= 1e-7 * np.linalg.norm(sigma)
        assert np.linalg.norm(pair.yo - sigma) <= 1e-7 * np.linalg.norm(sigma)


def test_balance_scalar_closed_form():
    model = StateSpaceModel.from_matrices([[-1.0]], [[2.0]], [[1.0]])
    balanced = balance(model)
    np.testing.assert_allclose(balanced.hsv, [1.0])
    pair = infinite_gramians(balanced.model)
    assert pair.xc[0, 0] == pytest.approx(1.0)
    assert pair.yo[0, 0] == pytest.approx(1.0)


def test_balance_fixed_point():
    hsv = [1.0, 0.4, 0.1, 0.02]
    balanced = balance(balanced_siso(hsv))
    np.testing.assert_allclose(balanced.hsv, hsv, rtol=1e-9)
    np.testing.assert_allclose(np.abs(balanced.transform.t), np.eye(4), atol=1e-7)


def test_balance_rejects_unstable():
    model = StateSpaceModel.from_matrices([[1.0]], [[1.0]], [[1.0]])
    with pytest.raises(UnstableSystem):
        balance(model)


@pytest.mark.parametrize("hsv, criterion, expected", [
    ([1, 0.1, 0.01], ExplicitOrder(2), 2),
    ([1, 0.5, 0.5, 0.01], ExplicitOrder(2), 1),
    ([1, 0.1, 0.01], ErrorBudget(0.05), 2),
    ([1, 0.1, 0.01], RelativeFloor(0.05), 2),
    ([1, 0.1, 0.01], ExplicitOrder(7), 3),
])
def test_select_order(hsv, criterion, expected):
    assert select_order(hsv, criterion) == expected


def test_select_order_without_gap():
    with pytest.raises(NoValidGap) as info:
        select_order([0.5, 0.5, 0.1], ExplicitOrder(1))
    assert info.value.cluster == [0.5, 0.5]


def test_distinct_values_and_bound_curve():
    assert distinct_values([0.2, 0.2, 0.05]) == [0.2, 0.05]
    np.testing.assert_allclose(error_bound_curve([1.0, 0.2, 0.2, 0.05]), [2.5, 0.5, 0.5, 0.1, 0.0])


def test_truncate_full_order_is_identity(decoupled_model):
    balanced = balance(decoupled_model)
    reduced, report = truncate(balanced, 2)
    assert reduced is balanced.model
    assert (report.lower_bound, report.upper_bound) == (0.0, 0.0)
    assert math.isinf(report.gap_ratio)


def test_truncate_decoupled(decoupled_model):
    reduced, report = truncate(balance(decoupled_model), 1)
    assert reduced.n == 1
    assert reduced.a[0, 0] == pytest.approx(-1.0)
    assert abs(reduced.b[0, 0] * reduced.c[0, 0]) == pytest.approx(1.0)
    assert (report.lower_bound, report.upper_bound) == pytest.approx((0.25, 0.5))


def test_truncate_dedups_truncated_values():
    balanced = balance(balanced_diagonal([1.0, 0.2, 0.2 * (1 - 1e-7), 0.05]))
    _, report = truncate(balanced, 1)
    assert len(report.distinct_truncated) == 2
    assert report.upper_bound == pytest.approx(0.5, rel=1e-6)
    assert report.lower_bound == pytest.approx(0.2, rel=1e-6)


def test_truncate_rejects_split_cluster():
    balanced = balance(balanced_diagonal([1.0, 0.2, 0.2 * (1 - 1e-10), 0.05]))
    with pytest.raises(NoValidGap):
        truncate(balanced, 2)


def test_pipeline_identity(log_grid):
    model = gen_example('random_stable', 6, {}, 4)
    reduced, report, _ = balanced_truncation(model, ExplicitOrder(6))
    assert reduced.n == 6
    assert report.upper_bound == 0.0
    assert max_response_gap(model, reduced, log_grid) <= 1e-8


def test_pipeline_removes_uncontrollable_padding():
    core = balanced_siso([1.0, 0.3, 1e-6])
    a = block_diag(core.a, np.diag([-1.0, -3.0]))
    b = np.vstack([core.b, np.zeros((2, 1))])
    c = np.hstack([core.c, np.ones((1, 2))])
    model = StateSpaceModel.from_matrices(a, b, c)
    reduced, report, decomposition = balanced_truncation(model, ErrorBudget(1e-4))
    assert report.minimal_order == 3
    assert report.original_order == 5
    assert reduced.n == 2
    assert decomposition.dims == (3, 0, 2, 0)


def test_pipeline_rejects_unstable():
    model = StateSpaceModel.from_matrices(np.diag([1.0, -1.0]), [[1.0], [1.0]], [[1.0, 1.0]])
    with pytest.raises(UnstableSystem):
        balanced_truncation(model, ExplicitOrder(1))


def test_pipeline_keeps_stability():
    for seed in range(20):
        reduced, _, _ = balanced_truncation(gen_example('random_stable', 10, {}, seed), ExplicitOrder(4))
        assert is_stable(reduced)[0]


def test_report_dict_round_trip(decoupled_model):
    _, report = truncate(balance(decoupled_model), 2)
    data = report.to_dict()
    assert data['gap_ratio'] is None
    restored = ReductionReport.from_dict(data)
    assert math.isinf(restored.gap_ratio)
    assert restored.hsv_kept == report.hsv_kept


def test_decoupled_reduced_transfer(decoupled_model):
    reduced, _, _ = balanced_truncation(decoupled_model, ExplicitOrder(1))
    h = transfer_at(reduced, 0.0)
    np.testing.assert_allclose(np.abs(h), [[1.0, 0.0], [0.0, 0.0]], atol=1e-12)


@pytest.mark.parametrize("n", [30, 60, 100, 200])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pipeline_on_large_random_systems(n, seed):
    model = gen_example('random_stable', n, {}, seed)
    reduced, report, _ = balanced_truncation(model, ExplicitOrder(4))
    assert reduced.n == 4
    assert is_stable(reduced)[0]
    assert 0.0 < report.lower_bound <= report.upper_bound
    np.testing.assert_allclose(hankel_singular_values(model)[:4], report.hsv_kept, rtol=1e-6)


def _stable_planted(seed):
    model = planted_kalman((3, 2, 2, 1), seed)
    abscissa = np.max(np.linalg.eigvals(model.a).real)
    a = model.a - (abscissa + 0.5) * np.eye(model.n)
    return StateSpaceModel.from_matrices(a, model.b, model.c, model.d)


@pytest.mark.parametrize("seed", range(30))
def test_hsv_of_non_minimal_models_are_floored(seed):
    model = _stable_planted(seed)
    hsv = hankel_singular_values(model)
    assert hsv.size == 8
    assert np.all(hsv >= 1e-14 * hsv[0] * (1 - 1e-12))
    minimal, _ = minimal_realization(model)
    np.testing.assert_allclose(hsv[:3], hankel_singular_values(minimal), rtol=1e-5, atol=1e-6 * hsv[0])
