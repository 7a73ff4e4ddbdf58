"""
Weyl operator, the electromagnetic spinor bilinear and its Maxwell identities,
and the quadrilinear tensor J with its divergence conditions.
All 4-dimensional operations use a (1,3) representation with metric (+,-,-,-).
"""
import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from app.bilinear_forms import Momentum
from app.clifford_core import PAULI, Chirality, GammaRep, Signature, build_gamma_rep
from app.errors import DimensionError, MomentumError
from app.spinor_spaces import Spinor

logger = logging.getLogger(__name__)

FIELD_TOL = 1e-10
NULL_CONE_TOL = 1e-12
KERNEL_TOL = 1e-9
MINKOWSKI = np.array([1.0, -1.0, -1.0, -1.0])

SpinorLike = Union[Spinor, np.ndarray]


def minkowski_rep() -> GammaRep:
    return build_gamma_rep(2, Signature(1, 3))


def _components(psi: SpinorLike) -> np.ndarray:
    if isinstance(psi, Spinor):
        return psi.components
    return np.asarray(psi, dtype=complex).reshape(-1)


def _require_four_dimensional(rep: GammaRep) -> None:
    if rep.dim != 4:
        raise DimensionError(f"field tensors are defined for 2n = 4, got 2n = {rep.dim}")


def _sign_value(sign) -> int:
    value = Chirality.parse(sign).sign
    if value == 0:
        raise ValueError("sign must be + or -")
    return value


def levi_civita() -> np.ndarray:
    """Rank-4 alternating symbol with eps[0,1,2,3] = +1."""
    eps = np.zeros((4, 4, 4, 4))
    for perm in permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


def slash(p: np.ndarray, rep: GammaRep) -> np.ndarray:
    """p-slash = p^a gamma_a for contravariant components p^a."""
    return np.tensordot(np.asarray(p, dtype=complex), rep.stack, axes=1)


def adjoint(psi: SpinorLike, rep: GammaRep) -> np.ndarray:
    """Dirac adjoint row psi^dagger gamma_0."""
    return _components(psi).conj() @ rep.generators[rep.timelike_index]


def weyl_operator(z: np.ndarray, rep: GammaRep, sign=1) -> np.ndarray:
    """
    sum_a Z_a gamma^a (I +- vol) for covariant components Z_a.

    Example:
        op = weyl_operator(rep.metric * p, rep, +1)   # p-slash (1 + gamma_5)
    """
    z = np.asarray(z, dtype=complex)
    if z.shape != (rep.dim,):
        raise DimensionError(f"Z has shape {z.shape}, expected ({rep.dim},)")
    raised = np.tensordot(rep.metric * z, rep.stack, axes=1)
    return raised @ (rep.identity + _sign_value(sign) * rep.volume)


def two_spinor_momentum(phi: np.ndarray) -> Momentum:
    """
    Null momentum from a two-component spinor: p0 = phi^dagger phi, pk = phi^dagger sigma_k phi.
    """
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.shape != (2,):
        raise DimensionError(f"two-component spinor expected, got shape {phi.shape}")
    if np.linalg.norm(phi) == 0:
        raise MomentumError("phi must be nonzero")
    p = [np.vdot(phi, phi).real] + [np.vdot(phi, sigma @ phi).real for sigma in PAULI]
    return Momentum(components=np.array(p), metric=MINKOWSKI.copy())


@dataclass(frozen=True, eq=False)
class WeylSolutions:
    """Kernel basis of the Weyl equation for one momentum."""

    spinors: List[np.ndarray]
    momentum: Momentum
    degenerate: bool
    max_residual: float

    @property
    def dim(self) -> int:
        return len(self.spinors)


def weyl_solutions(p: Momentum, rep: GammaRep, tol: float = KERNEL_TOL,
                   full_kernel: bool = False) -> WeylSolutions:
    """
    Solutions of p-slash (1 + gamma_5) psi = 0 for a null momentum.

    The literal kernel of p-slash (1 + gamma_5) also contains every
    negative-chirality spinor, on which the adjoint identity fails. By default
    the basis spans the spinors whose two chiral parts are both annihilated by
    p-slash; full_kernel=True returns the literal kernel instead.

    Args:
        p: Contravariant 4-momentum
        rep: (1,3) representation
        tol: Relative rank tolerance for the kernel
        full_kernel: Return the whole kernel of p-slash (1 + gamma_5)

    Returns:
        WeylSolutions; p = 0 is flagged degenerate and yields the whole space
    """
    _require_four_dimensional(rep)
    components = np.asarray(p.components, dtype=float)
    scale = float(np.sum(components ** 2))
    if scale == 0:
        logger.warning("zero momentum: every spinor solves the Weyl equation")
        basis = [rep.identity[:, k] for k in range(rep.spinor_dim)]
        return WeylSolutions(spinors=basis, momentum=p, degenerate=True, max_residual=0.0)

    square = float(np.sum(rep.metric * components ** 2))
    if abs(square) > NULL_CONE_TOL * scale:
        raise MomentumError(f"momentum is not null: p^2 = {square:.3e}")

    covariant = rep.metric * components
    plus_op = weyl_operator(covariant, rep, +1)
    matrix = plus_op if full_kernel else np.vstack([plus_op, weyl_operator(covariant, rep, -1)])
    kernel = linalg.null_space(matrix, rcond=tol)
    spinors = [kernel[:, k] for k in range(kernel.shape[1])]
    residual = max((float(np.linalg.norm(plus_op @ s)) for s in spinors), default=0.0)
    logger.debug(f"Weyl kernel for p={components.tolist()}: dim={len(spinors)}, residual={residual:.2e}")
    return WeylSolutions(spinors=spinors, momentum=p, degenerate=False, max_residual=residual)


def adjoint_residual(psi: SpinorLike, p: Momentum, rep: GammaRep) -> float:
    """|| psi~ p-slash (1 - gamma_5) ||, which vanishes on Weyl solutions."""
    row = adjoint(psi, rep) @ slash(p.components, rep) @ (rep.identity - rep.volume)
    return float(np.linalg.norm(row))


@dataclass(frozen=True, eq=False)
class EmTensor:
    F: np.ndarray
    chirality: Chirality


def em_tensor(psi: SpinorLike, rep: GammaRep, chirality=Chirality.PLUS) -> EmTensor:
    """
    F_{mu nu} = psi~ [gamma_mu, gamma_nu] (1 +- gamma_5) psi.

    Only the upper triangle is computed; the lower triangle is its negative.
    """
    _require_four_dimensional(rep)
    sign = _sign_value(chirality)
    vec = _components(psi)
    row = adjoint(vec, rep)
    column = (rep.identity + sign * rep.volume) @ vec
    f = np.zeros((4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(mu + 1, 4):
            gm, gn = rep.generators[mu], rep.generators[nu]
            f[mu, nu] = row @ (gm @ gn - gn @ gm) @ column
            f[nu, mu] = -f[mu, nu]
    return EmTensor(F=f, chirality=Chirality.parse(chirality))


@dataclass(frozen=True)
class MaxwellResiduals:
    r_plus: np.ndarray
    r_minus: np.ndarray
    is_solution: bool

    @property
    def norms(self) -> Tuple[float, float]:
        return float(np.linalg.norm(self.r_plus)), float(np.linalg.norm(self.r_minus))


def maxwell_residuals(psi: SpinorLike, p: Momentum, rep: GammaRep, tol: float = FIELD_TOL) -> MaxwellResiduals:
    """
    r+_nu = p^mu F+_{mu nu} and r-_rho = p_mu eps^{mu rho tau lambda} F-_{tau lambda}.

    Residuals are always computed; is_solution records whether psi satisfied
    the Weyl equation for p, so non-vacuum inputs are flagged rather than rejected.
    """
    _require_four_dimensional(rep)
    vec = _components(psi)
    upper = np.asarray(p.components, dtype=float)
    lower = rep.metric * upper
    f_plus = em_tensor(vec, rep, Chirality.PLUS).F
    f_minus = em_tensor(vec, rep, Chirality.MINUS).F

    r_plus = upper @ f_plus
    r_minus = np.einsum("m,mrtl,tl->r", lower, levi_civita(), f_minus)

    scale = max(float(np.linalg.norm(vec)), 1e-300) * max(float(np.linalg.norm(upper)), 1e-300)
    equation = weyl_operator(lower, rep, +1) @ vec
    is_solution = float(np.linalg.norm(equation)) <= tol * scale and adjoint_residual(vec, p, rep) <= tol * scale
    return MaxwellResiduals(r_plus=r_plus, r_minus=r_minus, is_solution=bool(is_solution))


@dataclass(frozen=True, eq=False)
class QuadTensor:
    """J_{mu nu} = a_mu b_nu with its source spinors and optional label tags."""

    J: np.ndarray
    a: np.ndarray
    b: np.ndarray
    sources: Tuple[np.ndarray, ...]
    labels: Dict[str, str] = field(default_factory=dict)


def chiral_current(psi1: SpinorLike, psi2: SpinorLike, rep: GammaRep) -> np.ndarray:
    """a_mu = psi1~ gamma_mu (1 + gamma_5) psi2."""
    row = adjoint(psi1, rep)
    column = (rep.identity + rep.volume) @ _components(psi2)
    return np.array([row @ g @ column for g in rep.generators])


def quad_tensor(psi1: SpinorLike, psi2: SpinorLike, psi3: SpinorLike, psi4: SpinorLike,
                rep: GammaRep, labels: Optional[Dict[str, str]] = None) -> QuadTensor:
    """
    Quadrilinear J_{mu nu} = psi1~ gamma_mu (1+gamma_5) psi2 * psi3~ gamma_nu (1+gamma_5) psi4.

    labels attaches metadata tags (e.g. {"psi1": "proton"}); no dynamics use them.
    """
    _require_four_dimensional(rep)
    a = chiral_current(psi1, psi2, rep)
    b = chiral_current(psi3, psi4, rep)
    sources = tuple(_components(s) for s in (psi1, psi2, psi3, psi4))
    return QuadTensor(J=np.outer(a, b), a=a, b=b, sources=sources, labels=dict(labels or {}))


def symmetrize(quad: QuadTensor) -> np.ndarray:
    """J_sym = (J + J^T) / 2."""
    return 0.5 * (quad.J + quad.J.T)


def tensor_rank(matrix: np.ndarray, tol: float = 1e-9) -> int:
    """Numerical rank, singular values at or below tol * s_max counted as zero."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return int(np.linalg.matrix_rank(matrix, tol=tol * np.linalg.norm(matrix, 2)))


def divergence_residuals(quad: QuadTensor, p: Momentum) -> Tuple[np.ndarray, np.ndarray]:
    """(p^mu J_{mu nu}, p^nu J_{mu nu})."""
    upper = np.asarray(p.components, dtype=float)
    return upper @ quad.J, quad.J @ upper
