"""
Exception hierarchy for the spinor workbench.
Library code raises these; the CLI maps them to exit codes.
"""
from typing import Optional, Sequence


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class DimensionError(WorkbenchError, ValueError):
    """Half-dimension, signature or vector length outside what an operation supports."""


class ChiralityError(WorkbenchError, ValueError):
    """Chirality tag missing or inconsistent with the spinor components."""


class ZeroSpinorError(WorkbenchError, ValueError):
    """Spinor norm below tolerance where a nonzero spinor is required."""


class RankAmbiguityError(WorkbenchError):
    """
    A singular value fell inside the guard band of a rank decision.

    Callers should tighten or loosen the tolerance and retry.
    """

    def __init__(self, message: str, singular_values: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.singular_values = list(singular_values) if singular_values is not None else []


class PairingError(WorkbenchError):
    """Requested spinor pairing is not available for this representation."""


class RealityError(WorkbenchError):
    """Imaginary residue above tolerance in a bilinear expected to be real."""


class MomentumError(WorkbenchError, ValueError):
    """Momentum input violates a precondition (not null, zero seed spinor, too short)."""


class QuadratureError(WorkbenchError):
    """Adaptive quadrature did not reach the requested tolerance."""


class EigenSolverError(WorkbenchError):
    """Eigen-solver failure, or a grid too coarse for the requested spectrum."""


class VolumeError(WorkbenchError, KeyError):
    """Unsupported (domain, provenance) combination."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ConfigError(WorkbenchError):
    """Invalid run configuration."""


class ReportSchemaError(WorkbenchError):
    """A report body does not match the published schema for its kind."""
