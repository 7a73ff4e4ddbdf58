"""
Wyler's closed-form fine-structure constant from homogeneous-domain volumes.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from app.errors import VolumeError

logger = logging.getLogger(__name__)

EXPERIMENTAL_INVERSE_ALPHA = 137.035999084
PRINTED_INVERSE_ALPHA = 137.0608
CORRECTED_INVERSE_ALPHA = 137.03608
ACCEPT_RANGE = (137.0, 137.1)
MC_CHUNK = 1_000_000


class Provenance(str, Enum):
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"
    OVERRIDE = "override"


class DomainVolumes:
    """Closed-form volumes of the domains entering the formula, keyed by override name."""

    CLOSED_FORM = {
        "S4": 8.0 * np.pi ** 2 / 3.0,
        "D5": np.pi ** 5 / (2 ** 4 * 120),
        "Q5": 8.0 * np.pi ** 3 / 3.0,
    }
    OVERRIDE_KEYS = {"V_S4": "S4", "V_D5": "D5", "V_Q5": "Q5"}
    MONTE_CARLO_SUPPORTED = ("S4",)


@dataclass(frozen=True)
class DomainVolume:
    name: str
    value: float
    provenance: Provenance
    samples: Optional[int] = None

    def __post_init__(self):
        if not self.value > 0:
            raise VolumeError(f"volume of {self.name} must be positive, got {self.value}")

    def as_dict(self) -> Dict[str, Any]:
        record = {"name": self.name, "value": self.value, "provenance": self.provenance.value}
        if self.samples is not None:
            record["samples"] = self.samples
        return record


def _monte_carlo_s4(samples: int, seed: int) -> float:
    """Surface volume of the unit 4-sphere as 5 x (volume of the unit 5-ball), from cube sampling."""
    rng = np.random.default_rng(seed)
    inside = 0
    remaining = samples
    while remaining > 0:
        chunk = min(remaining, MC_CHUNK)
        points = rng.uniform(-1.0, 1.0, size=(chunk, 5))
        inside += int(np.count_nonzero(np.einsum("ij,ij->i", points, points) <= 1.0))
        remaining -= chunk
    ball = 2.0 ** 5 * inside / samples
    return 5.0 * ball


def volume(name: str, provenance: Provenance = Provenance.CLOSED_FORM,
           samples: int = 10_000_000, seed: int = 0) -> DomainVolume:
    """
    Volume of S4, D5 or Q5.

    Monte-Carlo estimates exist for S4 only; other combinations raise VolumeError.
    """
    provenance = Provenance(provenance)
    if name not in DomainVolumes.CLOSED_FORM:
        raise VolumeError(f"unknown domain '{name}', choose one of {sorted(DomainVolumes.CLOSED_FORM)}")
    if provenance is Provenance.CLOSED_FORM:
        return DomainVolume(name, DomainVolumes.CLOSED_FORM[name], provenance)
    if provenance is Provenance.MONTE_CARLO and name in DomainVolumes.MONTE_CARLO_SUPPORTED:
        if samples <= 0:
            raise ValueError("samples must be positive")
        estimate = _monte_carlo_s4(samples, seed)
        logger.info(f"Monte-Carlo V({name}) = {estimate:.6f} from {samples} samples")
        return DomainVolume(name, estimate, provenance, samples=samples)
    raise VolumeError(f"no {provenance.value} construction for {name}")


def parse_overrides(overrides: Optional[Mapping[str, float]]) -> Dict[str, float]:
    """Map V_S4/V_D5/V_Q5 override names to domain names, rejecting anything else."""
    parsed = {}
    for key, value in (overrides or {}).items():
        domain = DomainVolumes.OVERRIDE_KEYS.get(key.upper())
        if domain is None:
            raise VolumeError(f"unknown override '{key}', expected one of {sorted(DomainVolumes.OVERRIDE_KEYS)}")
        parsed[domain] = float(value)
    return parsed


def wyler_alpha(overrides: Optional[Mapping[str, float]] = None) -> Dict[str, Any]:
    """
    alpha = 8 pi V(D5)^(1/4) / (V(S4) V(Q5)).

    Args:
        overrides: Optional {"V_S4"|"V_D5"|"V_Q5": value} replacing closed-form volumes

    Returns:
        Dict with alpha, inverse_alpha, components (DomainVolume list), the
        round-trip residual and deltas against the experimental and printed values
    """
    replaced = parse_overrides(overrides)
    components: List[DomainVolume] = []
    for name in ("S4", "D5", "Q5"):
        if name in replaced:
            components.append(DomainVolume(name, replaced[name], Provenance.OVERRIDE))
        else:
            components.append(volume(name))
    v = {c.name: c.value for c in components}

    alpha = 8.0 * np.pi * v["D5"] ** 0.25 / (v["S4"] * v["Q5"])
    inverse = 1.0 / alpha
    round_trip = (alpha * v["S4"] * v["Q5"] / (8.0 * np.pi)) ** 4
    round_trip_residual = abs(round_trip - v["D5"]) / v["D5"]

    def delta(reference: float) -> Dict[str, float]:
        return {
            "reference": reference,
            "absolute": inverse - reference,
            "relative": (inverse - reference) / reference,
        }

    in_range = ACCEPT_RANGE[0] <= inverse <= ACCEPT_RANGE[1]
    if not in_range:
        logger.warning(f"1/alpha = {inverse:.6f} outside [{ACCEPT_RANGE[0]}, {ACCEPT_RANGE[1]}]")
    return {
        "alpha": alpha,
        "inverse_alpha": inverse,
        "components": components,
        "overridden": sorted(replaced),
        "round_trip_residual": round_trip_residual,
        "in_range": in_range,
        "delta_vs_experiment": delta(EXPERIMENTAL_INVERSE_ALPHA),
        "delta_vs_paper_printed": {
            "printed": delta(PRINTED_INVERSE_ALPHA),
            "decimal_corrected": delta(CORRECTED_INVERSE_ALPHA),
        },
    }
