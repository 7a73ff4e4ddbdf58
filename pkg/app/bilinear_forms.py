"""
Vector bilinears of spinor pairs, the null-vector theorem audit and momentum decomposition.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from app.clifford_core import Chirality, GammaRep, Signature, build_gamma_rep, projector, transpose_intertwiner
from app.errors import DimensionError, PairingError, RealityError
from app.seeds import SeedSplitter
from app.spinor_spaces import Spinor, random_chiral_spinor, random_pure_spinor

logger = logging.getLogger(__name__)

NULL_TOL = 1e-9
GENERIC_TOL = 1e-6
REALITY_TOL = 1e-10
DECOMPOSITION_TOL = 1e-10
TRIVIAL_NORM = 1e-12

AUDIT_ARMS = (("pure", "pure"), ("pure", "generic"), ("generic", "pure"), ("generic", "generic"))


class PairingMode(str, Enum):
    LORENTZIAN_ADJOINT = "lorentzian_adjoint"
    TRANSPOSE_INTERTWINER = "transpose_intertwiner"


@dataclass(frozen=True, eq=False)
class BilinearVector:
    components: np.ndarray
    pairing_mode: PairingMode

    def __post_init__(self):
        if not np.all(np.isfinite(self.components)):
            raise ValueError("bilinear vector has non-finite entries")

    @property
    def norm2(self) -> float:
        """Euclidean ||Z||^2 used to scale nullity thresholds."""
        return float(np.sum(np.abs(self.components) ** 2))


@dataclass(frozen=True, eq=False)
class Momentum:
    """Real 2n-vector with a diagonal metric."""

    components: np.ndarray
    metric: np.ndarray

    @property
    def square(self) -> float:
        return float(np.sum(self.metric * self.components ** 2))

    @property
    def dim(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True)
class MomentumDecomposition:
    head: Tuple[float, ...]
    extras: Tuple[float, ...]
    head_square: float
    mass_squared: float
    sign: int
    massless_ok: Optional[bool]

    @property
    def extras_square(self) -> float:
        return float(sum(x * x for x in self.extras))

    def sphere_radius(self) -> Optional[float]:
        """Radius of the sphere carrying the extras when sign*p^2 - M^2 is positive."""
        value = self.sign * self.head_square - self.mass_squared
        return float(np.sqrt(value)) if value > 0 else None


def pairing_matrix(rep: GammaRep, mode: PairingMode) -> np.ndarray:
    """C such that Z_a = psi^(T or dagger) C gamma_a phi."""
    mode = PairingMode(mode)
    if mode is PairingMode.LORENTZIAN_ADJOINT:
        if rep.timelike_index is None:
            raise PairingError(f"adjoint pairing needs a timelike generator; signature {rep.signature} has none")
        return np.asarray(rep.generators[rep.timelike_index])
    return transpose_intertwiner(rep)


def _paired_row(psi: np.ndarray, mode: PairingMode) -> np.ndarray:
    return psi.conj() if mode is PairingMode.LORENTZIAN_ADJOINT else psi


def vector_bilinear(psi: Spinor, phi: Spinor, rep: GammaRep, mode: PairingMode,
                    pairing: Optional[np.ndarray] = None) -> BilinearVector:
    """
    Z_a = <psi, gamma_a phi> under the selected pairing.

    Args:
        psi: Left spinor (conjugated in adjoint mode)
        phi: Right spinor
        rep: Representation
        mode: lorentzian_adjoint (psi^dagger gamma_0) or transpose_intertwiner (psi^T B)
        pairing: Precomputed pairing matrix, to skip rebuilding B in loops

    Returns:
        BilinearVector of 2n complex components
    """
    mode = PairingMode(mode)
    for spinor in (psi, phi):
        if spinor.dim != rep.spinor_dim:
            raise DimensionError(f"spinor has {spinor.dim} components, representation needs {rep.spinor_dim}")
    c_matrix = pairing if pairing is not None else pairing_matrix(rep, mode)
    row = _paired_row(psi.components, mode) @ c_matrix
    components = np.einsum("i,aij,j->a", row, rep.stack, phi.components)
    return BilinearVector(components=components, pairing_mode=mode)


def norm_squared(z: BilinearVector, metric: np.ndarray) -> complex:
    """Complex-bilinear Z.Z = sum_a metric[a] Z_a^2."""
    return complex(np.sum(np.asarray(metric) * z.components ** 2))


def hermitian_norm_squared(z: BilinearVector, metric: np.ndarray) -> float:
    """Diagnostic sum_a metric[a] |Z_a|^2."""
    return float(np.sum(np.asarray(metric) * np.abs(z.components) ** 2))


def partner_chirality(rep: GammaRep, mode: PairingMode, chirality: Chirality,
                      pairing: Optional[np.ndarray] = None) -> Chirality:
    """Chirality of phi for which <psi, gamma_a phi> is not identically zero."""
    chirality = Chirality.parse(chirality)
    c_matrix = pairing if pairing is not None else pairing_matrix(rep, mode)
    # projectors are real diagonal, so the same P_s sits left of C for both pairings
    left = projector(rep, chirality)
    for candidate in (chirality, chirality.opposite):
        right = projector(rep, candidate)
        if max(np.abs(left @ c_matrix @ g @ right).max() for g in rep.generators) > 1e-12:
            return candidate
    raise PairingError(f"no chirality pairs nontrivially with {chirality.value} in mode {mode}")


def audit_rep(n: int, mode: PairingMode) -> GammaRep:
    """Representation used by the theorem audit for a pairing mode."""
    if PairingMode(mode) is PairingMode.LORENTZIAN_ADJOINT:
        return build_gamma_rep(n, Signature.lorentzian(n))
    return build_gamma_rep(n, Signature.euclidean(n))


def _sample(kind: str, rep: GammaRep, chirality: Chirality, seed: int) -> Spinor:
    if kind == "pure":
        return random_pure_spinor(rep, chirality, seed)
    return random_chiral_spinor(rep, chirality, seed)


def theorem_audit(n: int, trials: int, seed: int,
                  modes: Tuple[PairingMode, ...] = tuple(PairingMode),
                  null_tol: float = NULL_TOL, generic_tol: float = GENERIC_TOL) -> List[Dict[str, Any]]:
    """
    Four-arm audit of the nullity theorem for every pairing mode.

    An arm with a pure member passes a trial when |Z.Z| <= null_tol * ||Z||^2.
    The generic-generic arm counts trials with |Z.Z| > generic_tol * ||Z||^2 as
    expected failures (non-null). All-zero Z is trivially null and excluded.

    Returns:
        One record per (mode, arm): n, pairing_mode, arm, trials, pass_count,
        max_residual, seeds, plus per-trial residuals and the Hermitian
        metric norms sum_a metric[a] |Z_a|^2 / ||Z||^2 as a diagnostic
    """
    if not 1 <= n <= 5:
        raise DimensionError(f"theorem audit supports 1 <= n <= 5, got n={n}")
    splitter = SeedSplitter(seed)
    records = []
    for mode_index, mode in enumerate(modes):
        mode = PairingMode(mode)
        rep = audit_rep(n, mode)
        c_matrix = pairing_matrix(rep, mode)
        left_chi = Chirality.PLUS
        right_chi = partner_chirality(rep, mode, left_chi, c_matrix)

        for arm_index, (left_kind, right_kind) in enumerate(AUDIT_ARMS):
            stream = 10 * mode_index + arm_index
            seeds = splitter.seeds(stream, trials)
            partner_seeds = splitter.seeds(stream + 500, trials)
            residuals = []
            hermitians = []
            trivial = 0
            passed = 0
            for trial_seed, partner_seed in zip(seeds, partner_seeds):
                psi = _sample(left_kind, rep, left_chi, trial_seed)
                phi = _sample(right_kind, rep, right_chi, partner_seed)
                z = vector_bilinear(psi, phi, rep, mode, pairing=c_matrix)
                scale = z.norm2
                if scale < TRIVIAL_NORM:
                    trivial += 1
                    residuals.append(None)
                    hermitians.append(None)
                    continue
                relative = abs(norm_squared(z, rep.metric)) / scale
                residuals.append(relative)
                # metric-weighted |Z|^2 over ||Z||^2; not a nullity criterion
                hermitians.append(hermitian_norm_squared(z, rep.metric) / scale)
                if relative <= null_tol:
                    passed += 1

            measured = [r for r in residuals if r is not None]
            has_pure = "pure" in (left_kind, right_kind)
            non_null = sum(1 for r in measured if r > generic_tol)
            record = {
                "n": n,
                "pairing_mode": mode.value,
                "arm": f"{left_kind}-{right_kind}",
                "trials": trials,
                "pass_count": passed,
                "non_null_count": non_null,
                "trivial_count": trivial,
                "max_residual": max(measured) if measured else 0.0,
                "min_residual": min(measured) if measured else 0.0,
                "seeds": seeds,
                "residuals": residuals,
                "hermitian_norms": hermitians,
                "max_abs_hermitian": max((abs(h) for h in hermitians if h is not None), default=0.0),
                "expects_null": has_pure or n <= 3,
            }
            logger.info(
                f"audit n={n} mode={mode.value} arm={record['arm']}: "
                f"null {passed}/{len(measured)}, non-null {non_null}, trivial {trivial}"
            )
            records.append(record)
    return records


def real_momentum(psi: Spinor, rep: GammaRep, tol: float = REALITY_TOL) -> Momentum:
    """
    P_a = psi~ gamma_a psi with psi~ = psi^dagger gamma_0.

    Raises RealityError when the imaginary residue exceeds tol * ||P||.
    """
    z = vector_bilinear(psi, psi, rep, PairingMode.LORENTZIAN_ADJOINT)
    imaginary = float(np.abs(z.components.imag).max())
    scale = float(np.linalg.norm(z.components))
    if imaginary > tol * max(scale, 1e-300):
        raise RealityError(f"imaginary residue {imaginary:.2e} exceeds {tol:.1e} * |P| = {tol * scale:.2e}")
    return Momentum(components=z.components.real.copy(), metric=np.asarray(rep.metric, dtype=float))


def decompose_momentum(p: Momentum, n: int, sign: Optional[int] = None,
                       tol: float = DECOMPOSITION_TOL) -> MomentumDecomposition:
    """
    Split P into the Minkowski head p_mu and the extra components.

    M^2 = sign * p_mu p^mu - sum(extras^2). Without an explicit sign the +
    convention is used when it gives M^2 >= 0, otherwise -. For n = 2 the
    record notes whether M^2 vanishes.
    """
    if 2 * n < 4 or p.dim < 4:
        raise DimensionError(f"decomposition needs at least 4 components, got 2n={2 * n}")
    if p.dim != 2 * n:
        raise DimensionError(f"momentum has {p.dim} components, expected {2 * n}")

    head = p.components[:4]
    extras = p.components[4:]
    head_square = float(np.sum(p.metric[:4] * head ** 2))
    extras_square = float(np.sum(extras ** 2))
    scale = float(np.sum(p.components ** 2))

    if sign is None:
        sign = 1 if head_square - extras_square >= -tol * scale else -1
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")

    mass_squared = sign * head_square - extras_square
    massless_ok = abs(mass_squared) <= tol * max(scale, 1.0) if n == 2 else None
    if massless_ok is False:
        logger.warning(f"n=2 decomposition has M^2={mass_squared:.3e}, expected 0")
    return MomentumDecomposition(
        head=tuple(float(x) for x in head),
        extras=tuple(float(x) for x in extras),
        head_square=head_square,
        mass_squared=float(mass_squared),
        sign=sign,
        massless_ok=massless_ok,
    )
