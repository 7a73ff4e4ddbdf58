"""
Test the S^3 kernel eigenvalues, energy levels and the Nystrom cross-check
"""
import numpy as np
import pytest
from numpy.polynomial import polynomial as P
from numpy.testing import assert_allclose
from scipy import special

from app.errors import DimensionError, EigenSolverError, QuadratureError
from app.fock_solver import (
    BALMER_LIMIT,
    SPHERE3_VOLUME,
    PhysicalConstants,
    ZonalKernel,
    _chebyu_coefficients,
    balmer_ratios,
    gegenbauer_zonal,
    kernel_eigenvalue,
    level_diagram,
    level_table,
    nystrom_cross_check,
    nystrom_levels,
    nystrom_matrix,
    nystrom_refinement,
    self_consistency_check,
    solve_levels,
    sphere3_grid,
    sphere_rule,
)


@pytest.fixture
def consts():
    return PhysicalConstants.from_source("CODATA-2018")


@pytest.mark.parametrize("n", range(1, 21))
def test_kernel_eigenvalue_is_inverse_n(n):
    assert kernel_eigenvalue(n) * n == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_gegenbauer_limits(n):
    assert gegenbauer_zonal(n, 0.0) == pytest.approx(n)
    assert gegenbauer_zonal(n, np.pi) == pytest.approx((-1) ** (n - 1) * n)
    assert gegenbauer_zonal(n, 0.3) == pytest.approx(np.sin(n * 0.3) / np.sin(0.3))


def test_kernel_singularity_is_integrable():
    kernel = ZonalKernel()
    theta = np.array([1e-2, 1e-3, 1e-4])

    assert_allclose(kernel(np.cos(theta)) * theta ** 2, 1.0, rtol=1e-4)
    assert_allclose(kernel.times_sin2(theta), kernel(np.cos(theta)) * np.sin(theta) ** 2, rtol=1e-6)


@pytest.mark.parametrize("n, quad_points", [(0, 128), (3, 32)])
def test_kernel_eigenvalue_rejects_bad_input(n, quad_points):
    with pytest.raises(DimensionError):
        kernel_eigenvalue(n, quad_points)


@pytest.mark.parametrize("reduced, expected", [(False, 13.605693), (True, 13.598287)])
def test_ground_state_energy(reduced, expected):
    consts = PhysicalConstants.from_source("CODATA-2018", reduced_mass=reduced)

    result = solve_levels(1, consts)

    assert result.levels[0].E_n_eV == pytest.approx(expected, rel=1e-6)


def test_levels_follow_inverse_square(consts):
    result = solve_levels(5, consts)

    energies = [lv.E_n_eV for lv in result.levels]
    assert energies[0] / energies[3] == 16.0
    assert_allclose([e * n ** 2 for n, e in enumerate(energies, start=1)], energies[0], rtol=1e-12)
    assert [lv.degeneracy for lv in result.levels] == [1, 4, 9, 16, 25]


def test_quadrature_path_matches_analytic(consts):
    analytic = solve_levels(6, consts)
    quadrature = solve_levels(6, consts, analytic=False)

    assert not quadrature.analytic
    assert_allclose([lv.E_n_eV for lv in quadrature.levels], [lv.E_n_eV for lv in analytic.levels], rtol=1e-7)


def test_solve_levels_rejects_zero(consts):
    with pytest.raises(DimensionError):
        solve_levels(0, consts)


def test_level_table_and_diagram(consts):
    result = solve_levels(5, consts)

    table = level_table(result)
    diagram = level_diagram(result)

    assert list(table.columns) == ["n", "lambda_n", "degeneracy", "p0", "E_n_eV"]
    assert len(table) == 5
    assert list(diagram.columns) == ["x", "y"]
    assert len(diagram) == 10
    assert (diagram["y"] < 0).all()


def test_balmer_ratios(consts):
    ratios = balmer_ratios(solve_levels(8, consts))

    assert ratios[0] == 1.0
    assert ratios[1] == 1.35
    assert all(a < b < BALMER_LIMIT for a, b in zip(ratios, ratios[1:]))
    assert BALMER_LIMIT == pytest.approx(1.8)


def test_balmer_ratios_need_three_levels(consts):
    with pytest.raises(DimensionError):
        balmer_ratios(solve_levels(2, consts))


def test_sphere_rules_have_correct_volume():
    s2_points, s2_weights = sphere_rule(8, 16)
    s3_points, s3_weights = sphere3_grid(12)

    assert s2_weights.sum() == pytest.approx(4 * np.pi)
    assert s3_weights.sum() == pytest.approx(SPHERE3_VOLUME)
    assert_allclose(np.linalg.norm(s2_points, axis=1), 1.0)
    assert_allclose(np.linalg.norm(s3_points, axis=1), 1.0)
    # integral of u_0^2 over S^3 is V / 4
    assert s3_weights @ s3_points[:, 0] ** 2 == pytest.approx(SPHERE3_VOLUME / 4)


def test_nystrom_matrix_fixes_constants():
    _, weights = sphere3_grid(8)
    root = np.sqrt(weights)

    for zonal_terms in (1, 3):
        assert_allclose(nystrom_matrix(8, zonal_terms) @ root, root, atol=1e-10)


def test_constant_subtraction_is_symmetric():
    matrix = nystrom_matrix(8, zonal_terms=1)

    assert_allclose(matrix, matrix.T)


def test_chebyu_coefficients():
    t = np.linspace(-0.9, 0.9, 7)
    for degree in range(6):
        assert_allclose(P.polyval(t, _chebyu_coefficients(degree)), special.eval_chebyu(degree, t), atol=1e-12)


def test_nystrom_cross_check():
    report = nystrom_cross_check(20, n_probe=3)

    assert report.zonal_terms == 3
    assert report.points == 20 ** 3 // 2
    assert report.lambda_1_error <= 1e-3
    assert [c["size"] for c in report.clusters] == [1, 4, 9]
    for cluster in report.clusters:
        assert cluster["relative_error"] <= 1e-3


def test_zonal_subtraction_beats_constant_subtraction():
    plain = nystrom_cross_check(16, n_probe=3, zonal_terms=1)
    zonal = nystrom_cross_check(16, n_probe=3, zonal_terms=3)

    for before, after in zip(plain.clusters[1:], zonal.clusters[1:]):
        assert after["relative_error"] < before["relative_error"]


def test_nystrom_refinement_is_monotone():
    table = nystrom_refinement([8, 12, 16], n_probe=3, zonal_terms=1)

    for n in (2, 3):
        errors = table[table["n"] == n]["relative_error"]
        assert errors.is_monotonic_decreasing
        assert errors.iloc[-1] < errors.iloc[0] / 4


def test_nystrom_levels_follow_cluster_means(consts):
    report = nystrom_cross_check(20, n_probe=3)
    spectrum = nystrom_levels(report, consts)
    exact = solve_levels(3, consts)

    assert not spectrum.analytic
    assert spectrum.metadata["zonal_terms"] == 3
    assert [lv.degeneracy for lv in spectrum.levels] == [1, 4, 9]
    scaled = [lv.E_n_eV * lv.n ** 2 for lv in spectrum.levels]
    assert (max(scaled) - min(scaled)) / scaled[0] <= 1e-3
    for approx, level in zip(spectrum.levels, exact.levels):
        assert approx.E_n_eV == pytest.approx(level.E_n_eV, rel=2e-3)


@pytest.mark.parametrize("grid, levels", [(4, 3), (12, 0), (12, 7)])
def test_nystrom_rejects_bad_input(grid, levels):
    with pytest.raises(EigenSolverError):
        nystrom_cross_check(grid, levels)


@pytest.mark.parametrize("zonal_terms", [0, 7])
def test_nystrom_rejects_bad_zonal_terms(zonal_terms):
    with pytest.raises(EigenSolverError, match="zonal_terms"):
        nystrom_matrix(8, zonal_terms)


def test_quadrature_failure_is_reported():
    with pytest.raises(QuadratureError, match="did not converge"):
        kernel_eigenvalue(200, quad_points=64, tol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_self_consistency(consts, n):
    report = self_consistency_check(n, consts, points=8, seed=3)

    assert report["pass"]
    assert report["max_relative_error"] <= 1e-9


@pytest.mark.slow
def test_fine_nystrom_grid():
    report = nystrom_cross_check(24, n_probe=4)

    assert report.points == 24 ** 3 // 2
    assert report.lambda_1_error <= 1e-3
    assert [c["size"] for c in report.clusters] == [1, 4, 9, 16]
    for cluster in report.clusters[:3]:
        assert cluster["relative_error"] <= 1e-3
