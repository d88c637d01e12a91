import math

import numpy as np
import pytest

from baltrunc.errors import NotPositiveDefinite, UnstableSystem
from baltrunc.generators import gen_example
from baltrunc.gramians import (
    GramianPair,
    controllability_measure,
    ellipsoid_axes,
    finite_gramians,
    infinite_gramians,
    lyapunov_solve,
    min_input_energy,
    observability_measure,
    output_energy,
    transform_gramians,
)
from baltrunc.statespace import SimilarityTransform, StateSpaceModel, apply_similarity

from conftest import random_transform


def test_lyapunov_scalar_and_diagonal():
    np.testing.assert_allclose(lyapunov_solve([[-1.0]], [[1.0]]), [[0.5]], atol=1e-15)
    np.testing.assert_array_equal(lyapunov_solve(np.diag([-1.0, -2.0]), np.zeros((2, 2))), np.zeros((2, 2)))
    np.testing.assert_allclose(lyapunov_solve(np.diag([-1.0, -2.0]), np.eye(2)), np.diag([0.5, 0.25]),
                               atol=1e-14)


def test_lyapunov_rejects_unstable():
    with pytest.raises(UnstableSystem) as info:
        lyapunov_solve([[1.0]], [[1.0]])
    assert info.value.abscissa == pytest.approx(1.0)


@pytest.mark.parametrize("kronecker_limit", [60, 0])
def test_lyapunov_residuals(kronecker_limit):
    for seed in range(20):
        model = gen_example('random_stable', 30, {'inputs': 2, 'outputs': 2}, seed)
        pair = infinite_gramians(model, kronecker_limit)
        bbt, ctc = model.b @ model.b.T, model.c.T @ model.c
        assert np.linalg.norm(model.a @ pair.xc + pair.xc @ model.a.T + bbt) <= 1e-9 * np.linalg.norm(bbt)
        assert np.linalg.norm(model.a.T @ pair.yo + pair.yo @ model.a + ctc) <= 1e-9 * np.linalg.norm(ctc)


def test_infinite_gramians_closed_forms(scalar_model):
    pair = infinite_gramians(scalar_model)
    assert pair.xc[0, 0] == pytest.approx(0.5, abs=1e-12)
    assert pair.yo[0, 0] == pytest.approx(0.5, abs=1e-12)
    assert pair.is_infinite

    model = StateSpaceModel.from_matrices(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, 1.0]])
    np.testing.assert_allclose(infinite_gramians(model).xc, [[1 / 2, 1 / 3], [1 / 3, 1 / 4]], atol=1e-14)


def test_infinite_gramians_zero_b():
    model = StateSpaceModel.from_matrices(np.diag([-1.0, -2.0]), np.zeros((2, 1)), [[1.0, 1.0]])
    np.testing.assert_array_equal(infinite_gramians(model).xc, np.zeros((2, 2)))


def test_finite_gramians_closed_forms(scalar_model):
    assert finite_gramians(scalar_model, 1.0).xc[0, 0] == pytest.approx((1 - math.exp(-2)) / 2, rel=1e-12)
    tiny = finite_gramians(scalar_model, 1e-8).xc[0, 0]
    assert tiny == pytest.approx(1e-8, rel=1e-6)
    unstable = StateSpaceModel.from_matrices([[1.0]], [[1.0]], [[1.0]])
    assert finite_gramians(unstable, 1.0).xc[0, 0] == pytest.approx((math.exp(2) - 1) / 2, rel=1e-12)


def test_finite_gramians_approach_infinite():
    model = gen_example('random_stable', 6, {}, 2)
    finite = finite_gramians(model, 200.0)
    infinite = infinite_gramians(model)
    assert np.linalg.norm(finite.xc - infinite.xc) <= 1e-8 * np.linalg.norm(infinite.xc)


def test_energy_forms(scalar_model):
    pair = infinite_gramians(scalar_model)
    assert output_energy(pair, [0.0]) == 0.0
    assert output_energy(pair, [1.0]) == pytest.approx(0.5)
    assert output_energy(pair, [-1.0]) == output_energy(pair, [1.0])
    assert min_input_energy(pair, [0.0]) == 0.0
    assert min_input_energy(pair, [1.0]) == pytest.approx(2.0)
    assert min_input_energy(pair, [3.0]) == pytest.approx(9 * min_input_energy(pair, [1.0]))


def test_min_input_energy_needs_definite_gramian():
    pair = GramianPair(np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(NotPositiveDefinite):
        min_input_energy(pair, [1.0, 1.0])


def test_directional_measures(decoupled_model):
    pair = infinite_gramians(decoupled_model)
    assert observability_measure(pair, [2.0, 0.0]) == pytest.approx(0.5)
    assert controllability_measure(pair, [0.0, 1.0]) == pytest.approx(0.25)
    lengths, directions = ellipsoid_axes(pair.xc)
    np.testing.assert_allclose(lengths, [0.5, 0.25])
    assert abs(directions[0, 0]) == pytest.approx(1.0)


def test_transform_gramians_matches_recomputation():
    rng = np.random.default_rng(7)
    model = gen_example('random_stable', 5, {}, 7)
    t = SimilarityTransform.from_matrix(random_transform(5, rng, 1e2))
    moved = transform_gramians(infinite_gramians(model), t)
    direct = infinite_gramians(apply_similarity(model, t))
    assert np.linalg.norm(moved.xc - direct.xc) <= 1e-8 * np.linalg.norm(direct.xc)
    assert np.linalg.norm(moved.yo - direct.yo) <= 1e-8 * np.linalg.norm(direct.yo)
