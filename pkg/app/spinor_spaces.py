"""
Dirac/Weyl spinors, their totally null planes and Cartan purity.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import expm

from app.clifford_core import (
    Chirality,
    GammaRep,
    chiral_indices,
    projector,
    transpose_intertwiner,
)
from app.errors import ChiralityError, DimensionError, RankAmbiguityError, ZeroSpinorError

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-9
CHIRALITY_TOL = 1e-10
GUARD_FACTOR = 10.0

# Cartan's count of quadratic purity conditions per half-dimension
PURITY_CONSTRAINTS = {1: 0, 2: 0, 3: 0, 4: 1, 5: 10}


@dataclass(frozen=True, eq=False)
class Spinor:
    """A nonzero 2^n-component spinor, optionally tagged with its chirality."""

    components: np.ndarray
    chirality: Chirality = Chirality.NONE

    def __post_init__(self):
        components = np.array(self.components, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(components)):
            raise ValueError("spinor components must be finite")
        if np.linalg.norm(components) == 0:
            raise ZeroSpinorError("spinor must be nonzero")
        components.setflags(write=False)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "chirality", Chirality.parse(self.chirality))

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def scaled(self, factor: complex) -> "Spinor":
        return Spinor(self.components * factor, self.chirality)

    def check_chirality(self, rep: GammaRep, tol: float = CHIRALITY_TOL) -> None:
        """Raise ChiralityError unless P^chirality fixes the components."""
        if self.dim != rep.spinor_dim:
            raise DimensionError(f"spinor has {self.dim} components, representation needs {rep.spinor_dim}")
        if self.chirality is Chirality.NONE:
            return
        drift = np.linalg.norm(projector(rep, self.chirality) @ self.components - self.components)
        if drift > tol * self.norm:
            raise ChiralityError(f"components are not {self.chirality.value}-chiral (drift {drift:.2e})")


def weyl_spinor(components, rep: GammaRep, chirality: Chirality) -> Spinor:
    """Build a chirality-tagged spinor and validate the tag against the representation."""
    spinor = Spinor(components, Chirality.parse(chirality))
    spinor.check_chirality(rep)
    return spinor


@dataclass(frozen=True, eq=False)
class NullPlane:
    """Basis (columns) of the totally null plane T_d(psi), with audit data."""

    basis: np.ndarray
    dim: int
    singular_values: np.ndarray = field(repr=False, default=None)
    nullity_residual: float = 0.0

    @property
    def vectors(self) -> List[np.ndarray]:
        return [self.basis[:, k] for k in range(self.dim)]


def annihilator_matrix(psi: Spinor, rep: GammaRep) -> np.ndarray:
    """2^n x 2n matrix whose a-th column is gamma_a psi."""
    return np.einsum("aij,j->ia", rep.stack, psi.components)


def _metric_gram(basis: np.ndarray, metric: np.ndarray) -> np.ndarray:
    return basis.T @ (metric[:, None] * basis)


def null_plane_of(psi: Spinor, rep: GammaRep, tol: float = DEFAULT_RANK_TOL) -> NullPlane:
    """
    Numerical kernel of Z -> sum_a Z_a gamma_a psi.

    Singular values below tol * s_max count as zero; one falling in
    [tol, GUARD_FACTOR * tol] * s_max makes the rank ambiguous.

    Args:
        psi: Nonzero spinor
        rep: Representation the spinor lives in
        tol: Relative rank tolerance

    Returns:
        NullPlane with an orthonormal basis and the re-verified nullity residual
    """
    if psi.dim != rep.spinor_dim:
        raise DimensionError(f"spinor has {psi.dim} components, representation needs {rep.spinor_dim}")
    if psi.norm < tol:
        raise ZeroSpinorError(f"spinor norm {psi.norm:.2e} below tolerance {tol:.1e}")

    matrix = annihilator_matrix(psi, rep)
    _, s, vh = np.linalg.svd(matrix, full_matrices=True)
    smax = s[0] if s.size else 0.0
    relative = s / smax if smax > 0 else np.zeros_like(s)

    band = (relative >= tol) & (relative <= GUARD_FACTOR * tol)
    if np.any(band):
        raise RankAmbiguityError(
            f"singular values {relative[band].tolist()} inside guard band [{tol:.1e}, {GUARD_FACTOR * tol:.1e}]",
            singular_values=relative.tolist(),
        )

    rank = int(np.sum(relative > GUARD_FACTOR * tol))
    basis = vh[rank:].conj().T
    d = basis.shape[1]
    residual = float(np.abs(_metric_gram(basis, rep.metric)).max()) if d else 0.0
    logger.debug(f"null plane of spinor: rank={rank}, d={d}, nullity residual={residual:.2e}")
    return NullPlane(basis=basis, dim=d, singular_values=relative, nullity_residual=residual)


def mutual_orthogonality(plane: NullPlane, psi: Spinor, rep: GammaRep) -> float:
    """Max of |(Z.gamma)(Z'.gamma) psi| over pairs of plane vectors."""
    worst = 0.0
    for z1 in plane.vectors:
        for z2 in plane.vectors:
            op1 = np.tensordot(z1, rep.stack, axes=1)
            op2 = np.tensordot(z2, rep.stack, axes=1)
            worst = max(worst, float(np.abs(op1 @ op2 @ psi.components).max()))
    return worst


def is_pure(psi: Spinor, rep: GammaRep, tol: float = DEFAULT_RANK_TOL) -> Tuple[bool, NullPlane]:
    """
    Cartan purity: the null plane has the maximal dimension n.

    Returns:
        (pure, evidence plane)
    """
    if psi.chirality is Chirality.NONE:
        raise ChiralityError("purity is decided for Weyl spinors; tag the spinor with a chirality")
    psi.check_chirality(rep)
    plane = null_plane_of(psi, rep, tol)
    return plane.dim == rep.half_dim, plane


def reference_spinor(rep: GammaRep, chirality: Chirality) -> Spinor:
    """First chiral basis vector of the requested chirality (a weight vector, hence pure)."""
    chirality = Chirality.parse(chirality)
    if chirality is Chirality.NONE:
        raise ChiralityError("reference spinor needs a chirality")
    components = np.zeros(rep.spinor_dim, dtype=complex)
    components[chiral_indices(rep, chirality)[0]] = 1.0
    return Spinor(components, chirality)


def spin_element(rep: GammaRep, coefficients: np.ndarray) -> np.ndarray:
    """exp(sum_{a<b} c_ab [gamma_a, gamma_b] / 4) for an upper-triangular coefficient array."""
    generator = np.zeros((rep.spinor_dim, rep.spinor_dim), dtype=complex)
    for a, b in combinations(range(rep.dim), 2):
        if coefficients[a, b] != 0:
            ga, gb = rep.generators[a], rep.generators[b]
            generator += coefficients[a, b] * (ga @ gb - gb @ ga) / 4.0
    return expm(generator)


def random_spin_element(rep: GammaRep, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    coefficients = np.triu(rng.normal(scale=scale, size=(rep.dim, rep.dim)), k=1)
    return spin_element(rep, coefficients)


def random_pure_spinor(rep: GammaRep, chirality: Chirality, seed: int, scale: float = 0.5) -> Spinor:
    """
    Seeded pure spinor: a random Spin-group element applied to the reference spinor.

    Example:
        psi = random_pure_spinor(build_gamma_rep(4, Signature(8, 0)), Chirality.PLUS, seed=3)
    """
    reference = reference_spinor(rep, chirality)
    rng = np.random.default_rng(seed)
    rotated = random_spin_element(rep, rng, scale) @ reference.components
    return Spinor(rotated / np.linalg.norm(rotated), reference.chirality)


def random_chiral_spinor(rep: GammaRep, chirality: Chirality, seed: int) -> Spinor:
    """Seeded generic spinor: complex Gaussian components projected to one chirality."""
    chirality = Chirality.parse(chirality)
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=rep.spinor_dim) + 1j * rng.normal(size=rep.spinor_dim)
    components = projector(rep, chirality) @ raw
    return Spinor(components / np.linalg.norm(components), chirality)


def purity_constraint_count(n: int) -> int:
    """Number of quadratic equations rendering a Weyl spinor of Cl(2n) pure (1 <= n <= 5)."""
    if n not in PURITY_CONSTRAINTS:
        raise DimensionError(f"purity constraint count is tabulated for 1 <= n <= 5, got n={n}")
    return PURITY_CONSTRAINTS[n]


def cartan_constraints(psi: Spinor, rep: GammaRep, b_matrix: Optional[np.ndarray] = None) -> Dict[Tuple[int, ...], complex]:
    """
    Quadratic forms psi^T B gamma_{[A]} psi for every index set |A| < n.

    A pure spinor makes all of them vanish.
    """
    if b_matrix is None:
        b_matrix = transpose_intertwiner(rep)
    eye = rep.identity
    values = {}
    for size in range(rep.half_dim):
        for indices in combinations(range(rep.dim), size):
            product = reduce(np.matmul, [rep.generators[a] for a in indices], eye)
            values[indices] = complex(psi.components @ b_matrix @ product @ psi.components)
    return values


def derived_constraint_count(rep: GammaRep, samples: int = 3, seed: int = 0, tol: float = 1e-8) -> int:
    """Count the Cartan forms that do not vanish identically on generic chiral spinors."""
    b_matrix = transpose_intertwiner(rep)
    peak: Dict[Tuple[int, ...], float] = {}
    for k in range(samples):
        psi = random_chiral_spinor(rep, Chirality.PLUS, seed + k)
        for indices, value in cartan_constraints(psi, rep, b_matrix).items():
            peak[indices] = max(peak.get(indices, 0.0), abs(value))
    return sum(1 for value in peak.values() if value > tol)
