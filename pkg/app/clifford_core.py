"""
Matrix representations of the complex Clifford algebra Cl(2n).
Recursive Pauli tensor-product construction in a chiral basis, with volume element and Weyl projectors.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.errors import DimensionError, WorkbenchError

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-12
MAX_HALF_DIM = 6

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


class Chirality(str, Enum):
    """Eigenvalue label of the volume element."""

    PLUS = "plus"
    MINUS = "minus"
    NONE = "none"

    @property
    def sign(self) -> int:
        return {"plus": 1, "minus": -1, "none": 0}[self.value]

    @property
    def opposite(self) -> "Chirality":
        if self is Chirality.NONE:
            return self
        return Chirality.MINUS if self is Chirality.PLUS else Chirality.PLUS

    @classmethod
    def parse(cls, value) -> "Chirality":
        if isinstance(value, cls):
            return value
        if value in (1, "+", "+1"):
            return cls.PLUS
        if value in (-1, "-", "-1"):
            return cls.MINUS
        if value in (0, None):
            return cls.NONE
        return cls(str(value).lower())


@dataclass(frozen=True)
class Signature:
    """Counts of generators squaring to +1 and to -1."""

    plus: int
    minus: int

    def __post_init__(self):
        if self.plus < 0 or self.minus < 0:
            raise DimensionError(f"signature counts must be non-negative, got ({self.plus}, {self.minus})")
        if self.total % 2:
            raise DimensionError(f"signature ({self.plus}, {self.minus}) has odd total dimension {self.total}")

    @property
    def total(self) -> int:
        return self.plus + self.minus

    @property
    def is_lorentzian(self) -> bool:
        return self.total >= 2 and min(self.plus, self.minus) == 1

    @classmethod
    def euclidean(cls, n: int) -> "Signature":
        return cls(2 * n, 0)

    @classmethod
    def lorentzian(cls, n: int, mostly_minus: bool = True) -> "Signature":
        """(1, 2n-1) when mostly_minus, else (2n-1, 1)."""
        return cls(1, 2 * n - 1) if mostly_minus else cls(2 * n - 1, 1)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse "p,q" or a named form: "euclidean:N", "lorentzian:N"."""
        text = text.strip().lower()
        if ":" in text:
            kind, _, size = text.partition(":")
            n = int(size)
            if kind == "euclidean":
                return cls.euclidean(n)
            if kind == "lorentzian":
                return cls.lorentzian(n)
            raise DimensionError(f"unknown signature kind '{kind}'")
        plus, _, minus = text.partition(",")
        return cls(int(plus), int(minus))

    def __str__(self) -> str:
        return f"({self.plus},{self.minus})"


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class GammaRep:
    """
    Concrete representation of Cl(2n): 2n generators of size 2^n x 2^n.

    Generator index 0 is the distinguished timelike generator in Lorentzian
    signatures. The volume element is diagonal with entries +1/-1.
    """

    half_dim: int
    signature: Signature
    generators: Tuple[np.ndarray, ...]
    metric: np.ndarray
    volume: np.ndarray
    _stack: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    @property
    def spinor_dim(self) -> int:
        return 2 ** self.half_dim

    @property
    def is_lorentzian(self) -> bool:
        return self.signature.is_lorentzian

    @property
    def timelike_index(self) -> Optional[int]:
        return 0 if self.is_lorentzian else None

    @property
    def stack(self) -> np.ndarray:
        """Generators as one (2n, 2^n, 2^n) array."""
        return self._stack

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.spinor_dim, dtype=complex)

    def raised(self, a: int) -> np.ndarray:
        """gamma^a = metric[a] * gamma_a."""
        return self.metric[a] * self.generators[a]


def _euclidean_generators(n: int) -> List[np.ndarray]:
    """Hermitian generators squaring to +I, built level by level."""
    gens = [SIGMA_1.copy(), SIGMA_2.copy()]
    vol = SIGMA_3.copy()
    for _ in range(n - 1):
        eye2 = np.eye(2, dtype=complex)
        gens = [np.kron(g, eye2) for g in gens] + [np.kron(vol, SIGMA_1), np.kron(vol, SIGMA_2)]
        vol = np.kron(vol, SIGMA_3)
    return gens


def _metric_for(sig: Signature) -> np.ndarray:
    if sig.minus == 1 and sig.plus != 1:
        signs = [-1.0] + [1.0] * sig.plus
    else:
        signs = [1.0] * sig.plus + [-1.0] * sig.minus
    return np.array(signs)


def _normalized_volume(generators: List[np.ndarray]) -> np.ndarray:
    product = reduce(np.matmul, generators)
    square = (product @ product)[0, 0].real
    # product squares to +I or -I; -i fixes the latter
    phase = 1.0 if square > 0 else -1j
    return phase * product


def build_gamma_rep(n: int, sig: Signature) -> GammaRep:
    """
    Build a chiral-basis representation of Cl(2n) with the given signature.

    Args:
        n: Half-dimension (vector space dimension 2n, spinor dimension 2^n)
        sig: Signature with plus + minus = 2n

    Returns:
        GammaRep whose generators satisfy the Clifford relations

    Example:
        rep = build_gamma_rep(2, Signature(1, 3))
    """
    if n < 1:
        raise DimensionError(f"half-dimension must be positive, got n={n}")
    if n > MAX_HALF_DIM:
        raise DimensionError(f"n={n} exceeds the supported maximum {MAX_HALF_DIM}")
    if sig.total != 2 * n:
        raise DimensionError(f"signature {sig} has dimension {sig.total}, expected {2 * n}")

    metric = _metric_for(sig)
    euclidean = _euclidean_generators(n)
    generators = [g if s > 0 else 1j * g for g, s in zip(euclidean, metric)]
    volume = _normalized_volume(generators)

    offdiag = np.abs(volume - np.diag(np.diag(volume))).max()
    if offdiag > IDENTITY_TOL:
        raise WorkbenchError(f"volume element not diagonal (off-diagonal {offdiag:.2e})")
    volume = np.diag(np.round(np.diag(volume).real))

    frozen = tuple(_frozen(g) for g in generators)
    stack = np.stack(frozen)
    stack.setflags(write=False)
    metric.setflags(write=False)
    logger.debug(f"Built Cl({2 * n}) representation with signature {sig}")
    return GammaRep(
        half_dim=n,
        signature=sig,
        generators=frozen,
        metric=metric,
        volume=_frozen(volume),
        _stack=stack,
    )


def volume_element(rep: GammaRep) -> np.ndarray:
    """Ordered product of all generators times the phase that makes it square to +I."""
    return _normalized_volume(list(rep.generators))


def weyl_projectors(rep: GammaRep) -> Tuple[np.ndarray, np.ndarray]:
    """Return (P+, P-) = ((I + vol)/2, (I - vol)/2)."""
    eye = rep.identity
    return 0.5 * (eye + rep.volume), 0.5 * (eye - rep.volume)


def projector(rep: GammaRep, chirality: Chirality) -> np.ndarray:
    chirality = Chirality.parse(chirality)
    if chirality is Chirality.NONE:
        return rep.identity
    plus, minus = weyl_projectors(rep)
    return plus if chirality is Chirality.PLUS else minus


def chiral_indices(rep: GammaRep, chirality: Chirality) -> np.ndarray:
    """Basis indices whose volume eigenvalue matches the chirality."""
    sign = Chirality.parse(chirality).sign
    return np.flatnonzero(np.diag(rep.volume).real == sign)


def _anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def clifford_residuals(rep: GammaRep) -> Dict[str, float]:
    """
    Max-norm residuals of every defining identity of the representation.

    Returns:
        Dict with anticommutator, volume and projector residuals plus trace_max
    """
    eye = rep.identity
    anti = 0.0
    for a in range(rep.dim):
        for b in range(a, rep.dim):
            target = 2 * rep.metric[a] * eye if a == b else 0 * eye
            residual = _anticommutator(rep.generators[a], rep.generators[b]) - target
            anti = max(anti, float(np.abs(residual).max()))

    vol = rep.volume
    vol_anti = max(float(np.abs(_anticommutator(vol, g)).max()) for g in rep.generators)
    plus, minus = weyl_projectors(rep)
    half = rep.spinor_dim // 2
    return {
        "anticommutator": anti,
        "volume_square": float(np.abs(vol @ vol - eye).max()),
        "volume_anticommutator": vol_anti,
        "volume_offdiagonal": float(np.abs(vol - np.diag(np.diag(vol))).max()),
        "projector_idempotent": max(
            float(np.abs(plus @ plus - plus).max()), float(np.abs(minus @ minus - minus).max())
        ),
        "projector_orthogonal": float(np.abs(plus @ minus).max()),
        "projector_complete": float(np.abs(plus + minus - eye).max()),
        "projector_rank_defect": float(abs(np.trace(plus).real - half) + abs(np.trace(minus).real - half)),
        "trace_max": max(float(abs(np.trace(g))) for g in rep.generators),
    }


@dataclass(frozen=True, eq=False)
class OddRep:
    """Cl(2n+1) generators: the 2n generators of a GammaRep plus its volume element."""

    base: GammaRep
    generators: Tuple[np.ndarray, ...]
    metric: np.ndarray
    report: Dict[str, float]


def extend_to_odd(rep: GammaRep) -> OddRep:
    """
    Append the normalized volume element as generator 2n+1.

    The report checks the Cl(2n+1) relations and that the even products
    e_a = gamma_a gamma_{2n+1} close under anticommutation and reproduce the
    bivectors of Cl(2n) (e_a e_b = -gamma_a gamma_b for a != b).
    """
    vol = rep.volume
    generators = tuple(rep.generators) + (vol,)
    metric = np.append(np.asarray(rep.metric), 1.0)
    eye = rep.identity

    anti = 0.0
    for a in range(len(generators)):
        for b in range(a, len(generators)):
            target = 2 * metric[a] * eye if a == b else 0 * eye
            anti = max(anti, float(np.abs(_anticommutator(generators[a], generators[b]) - target).max()))

    even = [g @ vol for g in rep.generators]
    closure = 0.0
    reproduction = 0.0
    for a, b in combinations(range(rep.dim), 2):
        anticomm = _anticommutator(even[a], even[b])
        scalar = np.trace(anticomm) / rep.spinor_dim
        closure = max(closure, float(np.abs(anticomm - scalar * eye).max()))
        reproduction = max(
            reproduction,
            float(np.abs(even[a] @ even[b] + rep.generators[a] @ rep.generators[b]).max()),
        )

    report = {
        "anticommutator": anti,
        "even_closure": closure,
        "even_reproduction": reproduction,
    }
    return OddRep(base=rep, generators=generators, metric=metric, report=report)


def transpose_intertwiner(rep: GammaRep) -> np.ndarray:
    """
    Matrix B with B gamma_a B^-1 = gamma_a^T for every generator.

    Every generator is symmetric or antisymmetric; B is the product of the
    antisymmetric ones when there is an even number of them, otherwise the
    product of the symmetric ones.
    """
    antisymmetric = [
        a for a, g in enumerate(rep.generators) if np.abs(g.T + g).max() <= IDENTITY_TOL
    ]
    chosen = antisymmetric
    if len(antisymmetric) % 2:
        chosen = [a for a in range(rep.dim) if a not in antisymmetric]
    b_matrix = reduce(np.matmul, [rep.generators[a] for a in chosen], rep.identity)

    b_inv = np.linalg.inv(b_matrix)
    residual = max(float(np.abs(b_matrix @ g @ b_inv - g.T).max()) for g in rep.generators)
    if residual > IDENTITY_TOL:
        raise WorkbenchError(f"transpose intertwiner check failed (residual {residual:.2e})")
    return b_matrix
