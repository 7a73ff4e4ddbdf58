"""
Test spinor purity and totally null planes
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.clifford_core import Chirality, Signature, build_gamma_rep, chiral_indices
from app.errors import ChiralityError, DimensionError, RankAmbiguityError, ZeroSpinorError
from app.spinor_spaces import (
    Spinor,
    cartan_constraints,
    derived_constraint_count,
    is_pure,
    mutual_orthogonality,
    null_plane_of,
    purity_constraint_count,
    random_chiral_spinor,
    random_pure_spinor,
    random_spin_element,
    reference_spinor,
    weyl_spinor,
)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("chirality", [Chirality.PLUS, Chirality.MINUS])
def test_reference_spinor_is_pure(euclidean_rep, n, chirality):
    rep = euclidean_rep(n)

    pure, plane = is_pure(reference_spinor(rep, chirality), rep)

    assert pure
    assert plane.dim == n
    assert plane.nullity_residual <= 1e-12


@pytest.mark.parametrize("n", [4, 5])
def test_spin_orbit_samples_are_pure(euclidean_rep, n):
    rep = euclidean_rep(n)

    for seed in range(10):
        psi = random_pure_spinor(rep, Chirality.PLUS, seed)
        pure, plane = is_pure(psi, rep)

        assert pure
        assert plane.nullity_residual <= 1e-9
        assert mutual_orthogonality(plane, psi, rep) <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_every_chiral_spinor_is_pure_below_n4(euclidean_rep, n):
    rep = euclidean_rep(n)

    for seed in range(20):
        pure, _ = is_pure(random_chiral_spinor(rep, Chirality.PLUS, seed), rep)
        assert pure


@pytest.mark.parametrize("n", [4, 5])
def test_generic_chiral_spinors_are_not_pure(euclidean_rep, n):
    rep = euclidean_rep(n)

    results = [is_pure(random_chiral_spinor(rep, Chirality.PLUS, seed), rep)[0] for seed in range(20)]

    assert not any(results)


def test_sum_of_far_weight_spinors_is_not_pure(euclidean_rep):
    rep = euclidean_rep(4)
    chirality = Chirality.PLUS if rep.volume[0, 0].real > 0 else Chirality.MINUS
    components = np.zeros(16, dtype=complex)
    components[0] = components[15] = 1.0

    pure, plane = is_pure(Spinor(components, chirality), rep)

    assert 15 in chiral_indices(rep, chirality)
    assert not pure
    assert plane.dim < 4


def test_purity_is_scale_invariant(euclidean_rep):
    rep = euclidean_rep(4)
    psi = random_pure_spinor(rep, Chirality.MINUS, seed=3)

    for factor in (1e-3, 2.0 - 5.0j, 1e4):
        pure, plane = is_pure(psi.scaled(factor), rep)
        assert pure
        assert plane.dim == 4


def test_null_plane_vectors_are_orthonormal(euclidean_rep):
    rep = euclidean_rep(3)

    plane = null_plane_of(random_chiral_spinor(rep, Chirality.PLUS, 11), rep)

    assert_allclose(plane.basis.conj().T @ plane.basis, np.eye(plane.dim), atol=1e-12)
    assert len(plane.vectors) == 3


def test_lorentzian_pure_spinor():
    rep = build_gamma_rep(4, Signature(1, 7))

    pure, plane = is_pure(random_pure_spinor(rep, Chirality.PLUS, seed=5), rep)

    assert pure
    assert plane.nullity_residual <= 1e-9


@pytest.mark.parametrize("n, expected", [(1, 0), (2, 0), (3, 0), (4, 1), (5, 10)])
def test_constraint_count(euclidean_rep, n, expected):
    assert purity_constraint_count(n) == expected
    assert derived_constraint_count(euclidean_rep(n)) == expected


def test_constraint_count_out_of_range():
    with pytest.raises(DimensionError):
        purity_constraint_count(6)


@pytest.mark.parametrize("n", [4, 5])
def test_cartan_constraints_vanish_on_pure_spinors(euclidean_rep, n):
    rep = euclidean_rep(n)

    values = cartan_constraints(random_pure_spinor(rep, Chirality.PLUS, seed=2), rep)

    assert max(abs(v) for v in values.values()) <= 1e-10


def test_cartan_constraint_detects_generic_spinor(euclidean_rep):
    rep = euclidean_rep(4)

    values = cartan_constraints(random_chiral_spinor(rep, Chirality.PLUS, seed=2), rep)

    assert abs(values[()]) > 1e-6


def test_zero_spinor_rejected():
    with pytest.raises(ZeroSpinorError):
        Spinor(np.zeros(4))


def test_purity_needs_chirality(euclidean_rep):
    rep = euclidean_rep(2)

    with pytest.raises(ChiralityError):
        is_pure(Spinor(np.ones(4)), rep)


def test_weyl_spinor_checks_tag(euclidean_rep):
    rep = euclidean_rep(2)
    plus = reference_spinor(rep, Chirality.PLUS)

    with pytest.raises(ChiralityError):
        weyl_spinor(plus.components, rep, Chirality.MINUS)


def test_dimension_mismatch(euclidean_rep):
    rep = euclidean_rep(3)

    with pytest.raises(DimensionError):
        null_plane_of(Spinor(np.ones(4)), rep)


def test_samplers_are_seeded(euclidean_rep):
    rep = euclidean_rep(4)

    first = random_pure_spinor(rep, Chirality.PLUS, seed=9)
    second = random_pure_spinor(rep, Chirality.PLUS, seed=9)

    assert_allclose(first.components, second.components, rtol=0, atol=0)
    assert first.norm == pytest.approx(1.0)


@pytest.mark.parametrize("n, seed", [(4, 1), (5, 2)])
def test_null_plane_dimension_is_spin_invariant(euclidean_rep, n, seed):
    rep = euclidean_rep(n)
    psi = random_chiral_spinor(rep, Chirality.PLUS, seed)
    dim = null_plane_of(psi, rep).dim
    rng = np.random.default_rng(seed)

    for _ in range(3):
        moved = Spinor(random_spin_element(rep, rng) @ psi.components, Chirality.PLUS)
        assert null_plane_of(moved, rep).dim == dim


def test_far_weight_null_plane_is_spin_invariant(euclidean_rep):
    rep = euclidean_rep(4)
    chirality = Chirality.PLUS if rep.volume[0, 0].real > 0 else Chirality.MINUS
    components = np.zeros(16, dtype=complex)
    components[0] = components[15] = 1.0
    psi = Spinor(components, chirality)
    rng = np.random.default_rng(4)

    moved = Spinor(random_spin_element(rep, rng) @ components, chirality)

    assert null_plane_of(moved, rep).dim == null_plane_of(psi, rep).dim < 4


def test_singular_value_in_guard_band_is_ambiguous(euclidean_rep):
    rep = euclidean_rep(4)
    psi = random_chiral_spinor(rep, Chirality.PLUS, seed=5)
    smallest = float(null_plane_of(psi, rep).singular_values.min())

    with pytest.raises(RankAmbiguityError) as info:
        null_plane_of(psi, rep, tol=smallest / 3.0)

    assert min(info.value.singular_values) == pytest.approx(smallest)


def test_tolerance_below_guard_band_decides_rank(euclidean_rep):
    rep = euclidean_rep(4)
    psi = random_chiral_spinor(rep, Chirality.PLUS, seed=5)
    smallest = float(null_plane_of(psi, rep).singular_values.min())

    plane = null_plane_of(psi, rep, tol=smallest / 20.0)

    assert plane.dim == null_plane_of(psi, rep).dim
