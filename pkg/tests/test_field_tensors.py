"""
Test the Weyl operator, Maxwell identities and the quadrilinear tensor
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.bilinear_forms import Momentum
from app.clifford_core import Chirality, chiral_indices
from app.errors import DimensionError, MomentumError
from app.field_tensors import (
    MINKOWSKI,
    adjoint_residual,
    divergence_residuals,
    em_tensor,
    levi_civita,
    maxwell_residuals,
    quad_tensor,
    symmetrize,
    tensor_rank,
    two_spinor_momentum,
    weyl_operator,
    weyl_solutions,
)


def _combination(solutions, rng):
    coefficients = rng.normal(size=solutions.dim) + 1j * rng.normal(size=solutions.dim)
    return sum(c * s for c, s in zip(coefficients, solutions.spinors))


def _momentum(components):
    return Momentum(components=np.array(components, dtype=float), metric=MINKOWSKI.copy())


def test_two_spinor_momentum_of_up_spinor():
    p = two_spinor_momentum(np.array([1.0, 0.0]))

    assert_allclose(p.components, [1.0, 0.0, 0.0, 1.0])


def test_two_spinor_momentum_is_null_and_phase_invariant(rng):
    for _ in range(50):
        phi = rng.normal(size=2) + 1j * rng.normal(size=2)
        p = two_spinor_momentum(phi)
        rotated = two_spinor_momentum(np.exp(0.7j) * phi)

        assert abs(p.square) <= 1e-12 * p.components[0] ** 2
        assert p.components[0] > 0
        assert_allclose(rotated.components, p.components, atol=1e-12)


def test_two_spinor_momentum_rejects_zero():
    with pytest.raises(MomentumError):
        two_spinor_momentum(np.zeros(2))


def test_weyl_operator_of_zero_vector(minkowski):
    assert_array_equal(weyl_operator(np.zeros(4), minkowski, +1), np.zeros((4, 4)))


def test_timelike_momentum_has_no_positive_chirality_kernel(minkowski):
    op = weyl_operator(MINKOWSKI * np.array([1.0, 0.0, 0.0, 0.0]), minkowski, +1)
    basis = np.eye(4)[:, chiral_indices(minkowski, Chirality.PLUS)]

    assert np.linalg.matrix_rank(op @ basis) == 2


def test_weyl_solutions_dimensions(minkowski, null_momentum):
    default = weyl_solutions(null_momentum, minkowski)
    literal = weyl_solutions(null_momentum, minkowski, full_kernel=True)

    assert default.dim == 2
    assert literal.dim == 3
    assert not default.degenerate
    assert default.max_residual <= 1e-10


def test_kernel_dimension_is_constant_on_the_cone(minkowski, rng):
    dims = set()
    for _ in range(20):
        p = two_spinor_momentum(rng.normal(size=2) + 1j * rng.normal(size=2))
        dims.add(weyl_solutions(p, minkowski).dim)

    assert dims == {2}


def test_zero_momentum_is_degenerate(minkowski):
    solutions = weyl_solutions(_momentum([0, 0, 0, 0]), minkowski)

    assert solutions.degenerate
    assert solutions.dim == 4


def test_non_null_momentum_rejected(minkowski):
    with pytest.raises(MomentumError):
        weyl_solutions(_momentum([1.0, 0.0, 0.0, 0.5]), minkowski)


def test_adjoint_identity_on_solutions(minkowski, null_momentum):
    for psi in weyl_solutions(null_momentum, minkowski).spinors:
        assert adjoint_residual(psi, null_momentum, minkowski) <= 1e-10


def test_maxwell_identities_for_up_spinor_momentum(minkowski, rng):
    p = _momentum([1.0, 0.0, 0.0, 1.0])
    psi = _combination(weyl_solutions(p, minkowski), rng)

    residuals = maxwell_residuals(psi, p, minkowski)

    plus, minus = residuals.norms
    assert plus <= 1e-10
    assert minus <= 1e-10
    assert residuals.is_solution


@pytest.mark.parametrize("seed", range(10))
def test_maxwell_identities_random_null_momenta(minkowski, seed):
    rng = np.random.default_rng(seed)
    p = two_spinor_momentum(rng.normal(size=2) + 1j * rng.normal(size=2))
    psi = _combination(weyl_solutions(p, minkowski), rng)

    plus, minus = maxwell_residuals(psi, p, minkowski).norms

    assert plus <= 1e-10
    assert minus <= 1e-10
    assert tensor_rank(em_tensor(psi, minkowski, Chirality.PLUS).F) == 2


def test_generic_spinor_violates_maxwell(minkowski, null_momentum, rng):
    hits = 0
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        residuals = maxwell_residuals(psi, null_momentum, minkowski)
        hits += residuals.norms[0] > 1e-6
        assert not residuals.is_solution

    assert hits >= 19


def test_zero_spinor_gives_zero_fields(minkowski, null_momentum):
    residuals = maxwell_residuals(np.zeros(4), null_momentum, minkowski)

    assert_array_equal(em_tensor(np.zeros(4), minkowski).F, np.zeros((4, 4)))
    assert residuals.norms == (0.0, 0.0)


def test_em_tensor_is_antisymmetric(minkowski, rng):
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)

    for chirality in (Chirality.PLUS, Chirality.MINUS):
        f = em_tensor(psi, minkowski, chirality).F
        assert_array_equal(f + f.T, np.zeros((4, 4)))


def test_levi_civita_convention():
    eps = levi_civita()

    assert eps[0, 1, 2, 3] == 1.0
    assert eps[1, 0, 2, 3] == -1.0
    assert eps[0, 0, 2, 3] == 0.0
    assert np.abs(eps).sum() == 24


def test_quad_tensor_divergences_vanish(minkowski, null_momentum, rng):
    solutions = weyl_solutions(null_momentum, minkowski)
    spinors = [_combination(solutions, rng) for _ in range(4)]

    quad = quad_tensor(*spinors, minkowski, labels={"psi1": "proton"})
    left, right = divergence_residuals(quad, null_momentum)

    assert np.linalg.norm(left) <= 1e-10
    assert np.linalg.norm(right) <= 1e-10
    assert quad.labels == {"psi1": "proton"}


def test_quad_tensor_structure(minkowski, rng):
    spinors = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(4)]

    quad = quad_tensor(*spinors, minkowski)
    swapped = quad_tensor(spinors[2], spinors[3], spinors[0], spinors[1], minkowski)
    repeated = quad_tensor(spinors[0], spinors[1], spinors[0], spinors[1], minkowski)

    assert tensor_rank(quad.J) <= 1
    assert_allclose(quad.J, swapped.J.T, atol=1e-12)
    assert_allclose(repeated.J, repeated.J.T, atol=1e-12)
    assert_allclose(symmetrize(quad), symmetrize(quad).T)


def test_generic_quadruple_violates_divergence(minkowski, null_momentum, rng):
    spinors = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(4)]

    left, _ = divergence_residuals(quad_tensor(*spinors, minkowski), null_momentum)

    assert np.linalg.norm(left) > 1e-6


def test_zero_momentum_divergence(minkowski, rng):
    spinors = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(4)]

    left, right = divergence_residuals(quad_tensor(*spinors, minkowski), _momentum([0, 0, 0, 0]))

    assert_array_equal(left, np.zeros(4))
    assert_array_equal(right, np.zeros(4))


def test_field_tensors_need_four_dimensions(euclidean_rep):
    with pytest.raises(DimensionError):
        em_tensor(np.ones(8), euclidean_rep(3))


def test_tensor_rank_is_relative_to_largest_singular_value():
    matrix = np.diag([2.0, 2e-6, 2e-12, 0.0])

    assert tensor_rank(matrix) == 2
    assert tensor_rank(matrix, tol=1e-5) == 1
    assert tensor_rank(1e-20 * matrix) == 2
    assert tensor_rank(np.zeros((4, 4))) == 0


def test_weyl_kernel_is_orthonormal(minkowski, null_momentum):
    solutions = weyl_solutions(null_momentum, minkowski)
    basis = np.stack(solutions.spinors, axis=1)

    assert_allclose(basis.conj().T @ basis, np.eye(solutions.dim), atol=1e-12)
