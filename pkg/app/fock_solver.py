"""
Hydrogen bound states from the momentum-space integral equation on S^3.
Zonal (Funk-Hecke) reduction, Nystrom cross-check, energy levels and Balmer ratios.
"""
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P
from scipy import integrate, linalg, special
from scipy.sparse import linalg as sparse_linalg

from app.errors import DimensionError, EigenSolverError, QuadratureError

logger = logging.getLogger(__name__)

SPHERE3_VOLUME = 2.0 * np.pi ** 2
MIN_QUAD_POINTS = 64
MIN_NYSTROM_GRID = 8
MAX_PROBE = 6
MAX_ZONAL_TERMS = 6
DEFAULT_ZONAL_TERMS = 3
ARPACK_TOL = 1e-12
COMPLEX_PAIR_TOL = 1e-8


@dataclass(frozen=True)
class ConstantsTable:
    alpha: float
    electron_rest_energy_eV: float
    proton_electron_mass_ratio: float
    speed_of_light: float = 299792458.0


class PhysicalConstantsSource:
    """Named vintages of the constants the solver needs."""

    TABLES = {
        "CODATA-2018": ConstantsTable(
            alpha=7.2973525693e-3,
            electron_rest_energy_eV=0.51099895000e6,
            proton_electron_mass_ratio=1836.15267343,
        ),
        "CODATA-2014": ConstantsTable(
            alpha=7.2973525664e-3,
            electron_rest_energy_eV=0.5109989461e6,
            proton_electron_mass_ratio=1836.15267389,
        ),
    }

    @classmethod
    def names(cls) -> List[str]:
        return sorted(cls.TABLES)

    @classmethod
    def get(cls, name: str) -> ConstantsTable:
        try:
            return cls.TABLES[name]
        except KeyError:
            raise KeyError(f"unknown constants source '{name}', choose one of {cls.names()}") from None


@dataclass(frozen=True)
class PhysicalConstants:
    """
    Fine-structure constant and the (optionally reduced) electron rest energy.

    Energies are in eV; momenta are reported as p0*c in eV.
    """

    alpha: float
    electron_rest_energy_eV: float
    proton_electron_mass_ratio: float
    reduced_mass: bool = True
    speed_of_light: float = 299792458.0
    source: str = "CODATA-2018"

    def __post_init__(self):
        for name in ("alpha", "electron_rest_energy_eV", "proton_electron_mass_ratio", "speed_of_light"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_source(cls, source: str = "CODATA-2018", reduced_mass: bool = True) -> "PhysicalConstants":
        table = PhysicalConstantsSource.get(source)
        return cls(
            alpha=table.alpha,
            electron_rest_energy_eV=table.electron_rest_energy_eV,
            proton_electron_mass_ratio=table.proton_electron_mass_ratio,
            reduced_mass=reduced_mass,
            speed_of_light=table.speed_of_light,
            source=source,
        )

    @property
    def rest_energy_eV(self) -> float:
        """m c^2 of the electron, reduced by the proton recoil when configured."""
        if not self.reduced_mass:
            return self.electron_rest_energy_eV
        return self.electron_rest_energy_eV / (1.0 + 1.0 / self.proton_electron_mass_ratio)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "electron_rest_energy_eV": self.electron_rest_energy_eV,
            "proton_electron_mass_ratio": self.proton_electron_mass_ratio,
            "reduced_mass": self.reduced_mass,
            "rest_energy_eV": self.rest_energy_eV,
            "source": self.source,
        }


@dataclass(frozen=True)
class ZonalKernel:
    """K(theta) = 1 / (2 (1 - cos theta)) = 1 / |u - u'|^2 for unit vectors, normalized by V(S^3)."""

    normalization: float = SPHERE3_VOLUME

    def __call__(self, cos_theta):
        return 1.0 / (2.0 * (1.0 - np.asarray(cos_theta, dtype=float)))

    def times_sin2(self, theta):
        """K(theta) sin^2(theta) = (1 + cos theta) / 2, the bounded radial density."""
        return 0.5 * (1.0 + np.cos(theta))


@dataclass(frozen=True)
class Level:
    n: int
    lambda_n: float
    degeneracy: int
    p0: float
    E_n_eV: float


@dataclass(frozen=True)
class SpectralResult:
    levels: List[Level]
    constants: PhysicalConstants
    analytic: bool = True
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return max(level.n for level in self.levels) if self.levels else 0


def gegenbauer_zonal(n: int, theta) -> np.ndarray:
    """
    C^(1)_{n-1}(cos theta) = sin(n theta) / sin(theta).

    Evaluated through the Chebyshev U polynomial, which gives the limits
    n at theta = 0 and (-1)^(n-1) n at theta = pi without division.
    """
    if n < 1:
        raise DimensionError(f"harmonic index must be >= 1, got {n}")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12):
        raise ValueError("theta must lie in [0, pi]")
    return special.eval_chebyu(n - 1, np.cos(np.clip(theta, 0.0, np.pi)))


def kernel_eigenvalue(n: int, quad_points: int = 128, tol: float = 1e-10) -> float:
    """
    Eigenvalue of the normalized S^3 kernel on degree-(n-1) harmonics.

    lambda_n = (1 / (n pi)) * integral_0^pi cot(theta/2) sin(n theta) d theta,
    with the integrand rewritten as (1 + cos theta) * sin(n theta)/sin(theta).

    Args:
        n: Harmonic index (n >= 1)
        quad_points: Maximum number of adaptive subintervals (>= 64)
        tol: Absolute and relative quadrature tolerance

    Returns:
        lambda_n, analytically 1/n
    """
    if n < 1:
        raise DimensionError(f"harmonic index must be >= 1, got {n}")
    if quad_points < MIN_QUAD_POINTS:
        raise DimensionError(f"quad_points must be >= {MIN_QUAD_POINTS}, got {quad_points}")

    def integrand(theta: float) -> float:
        return (1.0 + np.cos(theta)) * float(gegenbauer_zonal(n, theta))

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(integrand, 0.0, np.pi, epsabs=tol, epsrel=tol, limit=quad_points)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature for n={n} did not converge: {exc}") from exc
    return value / (n * np.pi)


def solve_levels(n_max: int, consts: PhysicalConstants, quad_points: int = 128,
                 analytic: bool = True, tol: float = 1e-10) -> SpectralResult:
    """
    Energy levels from the eigencondition 1 = alpha (m c / p0) lambda_n.

    The analytic path uses lambda_n = 1/n exactly; otherwise the quadrature
    eigenvalue is used. Energies are positive binding magnitudes.
    """
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    mc2 = consts.rest_energy_eV
    levels = []
    for n in range(1, n_max + 1):
        lam = 1.0 / n if analytic else kernel_eigenvalue(n, quad_points, tol)
        p0 = consts.alpha * mc2 * lam
        energy = p0 ** 2 / (2.0 * mc2)
        levels.append(Level(n=n, lambda_n=lam, degeneracy=n * n, p0=p0, E_n_eV=energy))
    logger.info(f"Solved {n_max} levels ({'analytic' if analytic else 'quadrature'}): E_1 = {levels[0].E_n_eV:.6f} eV")
    return SpectralResult(
        levels=levels,
        constants=consts,
        analytic=analytic,
        metadata={"quad_points": quad_points, "tol": tol, "constants_source": consts.source},
    )


def level_table(result: SpectralResult) -> pd.DataFrame:
    """Spectrum as a DataFrame with columns n, lambda_n, degeneracy, p0, E_n_eV."""
    return pd.DataFrame(
        [(lv.n, lv.lambda_n, lv.degeneracy, lv.p0, lv.E_n_eV) for lv in result.levels],
        columns=["n", "lambda_n", "degeneracy", "p0", "E_n_eV"],
    )


def level_diagram(result: SpectralResult) -> pd.DataFrame:
    """Plain x,y columns for a level diagram: each level as a horizontal segment at -E_n."""
    rows = []
    for lv in result.levels:
        rows.append((0.0, -lv.E_n_eV))
        rows.append((1.0, -lv.E_n_eV))
    return pd.DataFrame(rows, columns=["x", "y"])


def balmer_ratios(result: SpectralResult) -> List[float]:
    """
    Balmer transition energies E_2 - E_n for n = 3..n_max, normalized to the n = 3 line.

    The analytic path uses exact rational arithmetic, so (n=4)/(n=3) is 27/20.
    """
    if result.n_max < 3:
        raise DimensionError(f"Balmer ratios need n_max >= 3, got {result.n_max}")
    if result.analytic:
        first = Fraction(1, 4) - Fraction(1, 9)
        return [float((Fraction(1, 4) - Fraction(1, n * n)) / first) for n in range(3, result.n_max + 1)]
    energies = {lv.n: lv.E_n_eV for lv in result.levels}
    first = energies[2] - energies[3]
    return [(energies[2] - energies[n]) / first for n in range(3, result.n_max + 1)]


BALMER_LIMIT = float(Fraction(1, 4) / (Fraction(1, 4) - Fraction(1, 9)))


def sphere_rule(n_theta: int, n_phi: int):
    """
    Product rule on S^2: Gauss-Legendre in cos(theta), uniform in phi.

    Returns:
        (points (N, 3), weights (N,)) with weights summing to 4 pi
    """
    x, wx = special.roots_legendre(n_theta)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    s = np.sqrt(1.0 - x ** 2)
    points = np.stack(
        [
            np.repeat(x, n_phi),
            np.repeat(s, n_phi) * np.tile(np.cos(phi), n_theta),
            np.repeat(s, n_phi) * np.tile(np.sin(phi), n_theta),
        ],
        axis=1,
    )
    weights = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
    return points, weights


def sphere3_grid(grid_size: int):
    """
    Product grid on S^3: Gauss rule in cos(chi) for the sin^2(chi) measure
    times the S^2 rule with grid_size // 2 polar and grid_size azimuthal nodes.

    Returns:
        (points (N, 4), weights (N,)) with weights summing to 2 pi^2
    """
    x, wx = special.roots_chebyu(grid_size)
    sphere, ws = sphere_rule(max(grid_size // 2, 2), grid_size)
    s = np.sqrt(1.0 - x ** 2)
    points = np.concatenate(
        [np.repeat(x, len(ws))[:, None], np.repeat(s, len(ws))[:, None] * np.tile(sphere, (grid_size, 1))],
        axis=1,
    )
    weights = np.repeat(wx, len(ws)) * np.tile(ws, grid_size)
    return points, weights


@dataclass(frozen=True)
class NystromReport:
    eigenvalues: List[float]
    clusters: List[Dict[str, float]]
    grid_size: int
    points: int
    zonal_terms: int = DEFAULT_ZONAL_TERMS

    @property
    def lambda_1_error(self) -> float:
        return abs(self.eigenvalues[0] - 1.0)


def _chebyu_coefficients(degree: int) -> np.ndarray:
    """Coefficients of U_degree(t) in ascending powers of t, from U_{k+1} = 2t U_k - U_{k-1}."""
    previous, current = np.zeros(1), np.ones(1)
    for _ in range(degree):
        previous, current = current, P.polysub(2.0 * P.polymulx(current), previous)
    return current


def _power_features(points: np.ndarray, degree: int) -> List[np.ndarray]:
    """
    Tensor powers of the node coordinates, one (N, 4^d) array per d <= degree,
    so that (u_i . u_j)^d is the inner product of row i and row j of the d-th array.
    """
    features = [np.ones((points.shape[0], 1))]
    for _ in range(degree):
        last = features[-1]
        features.append((last[:, :, None] * points[:, None, :]).reshape(points.shape[0], -1))
    return features


def nystrom_matrix(grid_size: int, zonal_terms: int = DEFAULT_ZONAL_TERMS) -> np.ndarray:
    """
    Symmetrized Nystrom matrix of the normalized kernel operator.

    At each node u_i the first zonal_terms harmonic components of psi are
    projected out with the grid rule, beta_m(i) = sum_j w_j U_{m-1}(t_ij) psi_j / 2 pi^2,
    their product with the singular kernel is dropped from the sum and
    added back analytically, which is beta_m(i) since the normalized kernel
    maps U_{m-1}(u_i . u) to U_{m-1}(u_i . u) / m:

      (T psi)_i = sum_m beta_m(i)
                  + sum_{j != i} w_j K_ij (psi_j - sum_m beta_m(i) U_{m-1}(t_ij)) / 2 pi^2

    beta_1 is taken as psi_i - sum_{m >= 2} m beta_m(i) so that the value at
    the node itself is reproduced. With zonal_terms = 1 this is the plain
    constant subtraction and the matrix is symmetric; otherwise each extra
    term adds a low-rank, row-scaled correction.

    Args:
        grid_size: Nodes per polar level (>= 8)
        zonal_terms: Number of subtracted zonal terms, 1..6
    """
    if not 1 <= zonal_terms <= MAX_ZONAL_TERMS:
        raise EigenSolverError(f"zonal_terms must be in [1, {MAX_ZONAL_TERMS}], got {zonal_terms}")
    points, weights = sphere3_grid(grid_size)
    root = np.sqrt(weights)
    # one N x N buffer: cosines -> kernel -> symmetrized couplings
    matrix = points @ points.T
    np.clip(matrix, -1.0, 1.0, out=matrix)
    np.fill_diagonal(matrix, 0.0)
    np.subtract(1.0, matrix, out=matrix)
    matrix *= 2.0
    np.reciprocal(matrix, out=matrix)
    np.fill_diagonal(matrix, 0.0)
    matrix *= root[:, None]
    matrix *= root[None, :] / SPHERE3_VOLUME

    features = _power_features(points, zonal_terms - 1)
    # moments[d][i] = sum_{j != i} w_j K_ij t_ij^d / 2 pi^2, read off the symmetrized form
    moments = [np.einsum("ik,ik->i", matrix @ (root[:, None] * phi), phi) / root for phi in features]
    defects = []
    for m in range(1, zonal_terms + 1):
        coefficients = _chebyu_coefficients(m - 1)
        defects.append(1.0 - sum(c * moments[d] for d, c in enumerate(coefficients)))

    matrix[np.diag_indices_from(matrix)] = defects[0]
    left, right = [], []
    for m in range(2, zonal_terms + 1):
        scale = (defects[m - 1] - m * defects[0]) * root / SPHERE3_VOLUME
        for d, c in enumerate(_chebyu_coefficients(m - 1)):
            if c == 0.0:
                continue
            left.append(c * scale[:, None] * features[d])
            right.append(root[:, None] * features[d])
    if left:
        matrix += np.concatenate(left, axis=1) @ np.concatenate(right, axis=1).T
    return matrix


def _leading_eigenvalues(matrix: np.ndarray, count: int, symmetric: bool, seed: int) -> np.ndarray:
    """The count eigenvalues of largest real part, in descending order."""
    size = matrix.shape[0]
    try:
        if symmetric:
            values = linalg.eigh(matrix, eigvals_only=True, subset_by_index=[size - count, size - 1])
            return np.sort(values)[::-1]
        try:
            v0 = np.random.default_rng(seed).standard_normal(size)
            values = sparse_linalg.eigs(matrix, k=count, which="LR", v0=v0, tol=ARPACK_TOL,
                                        ncv=min(size - 1, max(2 * count + 1, 40)), return_eigenvectors=False)
        except (sparse_linalg.ArpackNoConvergence, sparse_linalg.ArpackError) as exc:
            logger.warning(f"ARPACK did not converge ({exc}), falling back to the dense solver")
            values = linalg.eigvals(matrix)
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigen-solver failed: {exc}") from exc
    imaginary = float(np.abs(values.imag).max())
    if imaginary > COMPLEX_PAIR_TOL:
        logger.warning(f"Nystrom spectrum has imaginary parts up to {imaginary:.2e}")
    return np.sort(values.real)[::-1][:count]


def nystrom_cross_check(grid_size: int, n_probe: int = 3,
                        zonal_terms: int = DEFAULT_ZONAL_TERMS) -> NystromReport:
    """
    Largest eigenvalues of the discretized operator grouped into n^2-sized clusters.

    Args:
        grid_size: Nodes per polar level (>= 8)
        n_probe: Number of clusters to resolve (<= 6)
        zonal_terms: Zonal terms subtracted at each node (see nystrom_matrix)

    Returns:
        NystromReport with the n_probe cluster means (approximately 1/n)
    """
    if grid_size < MIN_NYSTROM_GRID:
        raise EigenSolverError(f"grid_size must be >= {MIN_NYSTROM_GRID}, got {grid_size}")
    if not 1 <= n_probe <= MAX_PROBE:
        raise EigenSolverError(f"n_probe must be in [1, {MAX_PROBE}], got {n_probe}")

    needed = sum(n * n for n in range(1, n_probe + 1))
    matrix = nystrom_matrix(grid_size, zonal_terms)
    size = matrix.shape[0]
    if size < 2 * needed:
        raise EigenSolverError(f"{size} grid points too coarse to resolve {n_probe} clusters")

    values = _leading_eigenvalues(matrix, needed, symmetric=zonal_terms == 1, seed=grid_size)

    clusters = []
    start = 0
    for n in range(1, n_probe + 1):
        block = values[start:start + n * n]
        start += n * n
        target = 1.0 / n
        clusters.append(
            {
                "n": n,
                "size": int(block.size),
                "mean": float(block.mean()),
                "spread": float(block.max() - block.min()),
                "relative_error": float(abs(block.mean() - target) / target),
                "max_relative_error": float(np.abs(block - target).max() / target),
            }
        )
    errors = ", ".join(f"{c['relative_error']:.1e}" for c in clusters)
    logger.info(f"Nystrom grid {grid_size} ({size} nodes, {zonal_terms} zonal terms): cluster errors {errors}")
    return NystromReport(eigenvalues=values.tolist(), clusters=clusters, grid_size=grid_size, points=size,
                         zonal_terms=zonal_terms)


def nystrom_levels(report: NystromReport, consts: PhysicalConstants) -> SpectralResult:
    """Energy levels from the Nystrom cluster means in place of the exact 1/n."""
    mc2 = consts.rest_energy_eV
    levels = []
    for cluster in report.clusters:
        lam = cluster["mean"]
        p0 = consts.alpha * mc2 * lam
        levels.append(Level(n=cluster["n"], lambda_n=lam, degeneracy=cluster["size"], p0=p0,
                            E_n_eV=p0 ** 2 / (2.0 * mc2)))
    return SpectralResult(
        levels=levels,
        constants=consts,
        analytic=False,
        metadata={"method": "nystrom", "grid_size": report.grid_size, "zonal_terms": report.zonal_terms,
                  "constants_source": consts.source},
    )


def nystrom_refinement(grid_sizes: List[int], n_probe: int = 3,
                       zonal_terms: int = DEFAULT_ZONAL_TERMS) -> pd.DataFrame:
    """Cluster-mean relative errors per grid, one row per (grid_size, n)."""
    rows = []
    for grid_size in grid_sizes:
        report = nystrom_cross_check(grid_size, n_probe, zonal_terms)
        for cluster in report.clusters:
            rows.append((grid_size, report.points, cluster["n"], cluster["mean"], cluster["relative_error"]))
    return pd.DataFrame(rows, columns=["grid_size", "points", "n", "mean", "relative_error"])


def _tangent_frame(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (4, 3) of the tangent space at u."""
    return linalg.null_space(u[None, :])


def apply_kernel(func, u: np.ndarray, n_theta: int = 48, n_sphere: int = 16) -> float:
    """
    (1 / 2 pi^2) integral over S^3 of K(u.u') func(u') with the pole placed at u.

    In these coordinates K sin^2(theta) = (1 + cos theta) / 2, so the integrand is smooth.
    """
    theta, wt = special.roots_legendre(n_theta)
    theta = 0.5 * np.pi * (theta + 1.0)
    wt = 0.5 * np.pi * wt
    directions, wd = sphere_rule(n_sphere, 2 * n_sphere)
    frame = _tangent_frame(u)
    tangents = directions @ frame.T
    total = 0.0
    radial = ZonalKernel().times_sin2(theta)
    for t, w, r in zip(theta, wt, radial):
        samples = np.cos(t) * u[None, :] + np.sin(t) * tangents
        total += w * r * float(np.dot(wd, func(samples)))
    return total / SPHERE3_VOLUME


def self_consistency_check(n: int, consts: PhysicalConstants, points: int = 20, seed: int = 0,
                           tol: float = 1e-9) -> Dict[str, Any]:
    """
    Substitute the n-th zonal harmonic into the right side of the integral equation.

    At p0 = alpha m c / n the scaled right side alpha (m c / p0) T[Y](u) must
    reproduce Y(u) at every sample point.
    """
    rng = np.random.default_rng(seed)
    pole = np.array([1.0, 0.0, 0.0, 0.0])
    samples = rng.normal(size=(points, 4))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)

    def harmonic(us: np.ndarray) -> np.ndarray:
        return special.eval_chebyu(n - 1, np.clip(us @ pole, -1.0, 1.0))

    mc2 = consts.rest_energy_eV
    p0 = consts.alpha * mc2 / n
    scale = consts.alpha * mc2 / p0
    worst = 0.0
    for u in samples:
        expected = float(harmonic(u[None, :])[0])
        scaled = scale * apply_kernel(harmonic, u)
        worst = max(worst, abs(scaled - expected) / max(1.0, abs(expected)))
    return {"n": n, "points": points, "seed": seed, "max_relative_error": worst, "pass": worst <= tol}
