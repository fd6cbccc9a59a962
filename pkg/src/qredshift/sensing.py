"""Sensing figures of merit: gravimetry, strain response, required qubits.

All estimates assume the protocol resolves a phase of `phase_resolution`
(default 0.1 rad) within one coherence window T_c, and invert the
closed-form phase expressions:

    gravimeter   dphi = R_earth * delta_g * t * mean_omega * n / c^2
    rotated 1D   dphi = g * mean_omega * spacing * n^2   * t / (4 c^2)
    rotated 2D   dphi = g * mean_omega * spacing * n^1.5 * t / (4 c^2)
    strain gauge dphi = g * spacing * mean_omega * n * t / c^2 * (1 + strain)

The 2D form sums the 1D column expression over the sqrt(n) columns of a
square grid; it inherits the n^(3/2) scaling from the linear chip
dimension L = sqrt(n) * spacing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

from .constants import DEFAULT_CONSTANTS, PhysicalConstants

__all__ = [
    "SensingConfig",
    "SensitivityReport",
    "RequiredQubits",
    "gravimeter_phase",
    "gravimeter_sensitivity",
    "closed_form_phase",
    "required_qubits",
    "strain_phase",
    "min_detectable_strain",
]

GeometryKind = Literal["1d", "2d"]


@dataclass(frozen=True)
class SensingConfig:
    """Chip and protocol parameters entering the sensitivity estimates.

    n                 qubit count
    mean_frequency    average angular frequency, rad/s
    coherence_time    T_c, s (the longest usable accumulation window)
    spacing           site spacing, m
    phase_resolution  smallest resolvable phase, rad
    """

    n: int
    mean_frequency: float
    coherence_time: float
    spacing: float = 1e-3
    phase_resolution: float = 0.1
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        for name in ("mean_frequency", "coherence_time", "spacing", "phase_resolution"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class SensitivityReport:
    """One sensing estimate: the phase at threshold and the derived figure of merit."""

    kind: str
    config: SensingConfig
    phase: float
    sensitivity: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class RequiredQubits:
    """Qubit count needed to reach the phase resolution, and the chip dimension it implies."""

    n: int
    length: float
    geometry: GeometryKind


def gravimeter_phase(config: SensingConfig, delta_g: float, t: float) -> float:
    """Phase R_earth * delta_g * t * mean_omega * n / c^2 picked up by the GHZ register."""
    if t > config.coherence_time:
        warnings.warn(
            f"accumulation time {t} s exceeds the coherence time {config.coherence_time} s",
            stacklevel=2,
        )
    cst = config.constants
    return cst.earth_radius * delta_g * t * config.mean_frequency * config.n / cst.c_squared


def gravimeter_sensitivity(config: SensingConfig) -> SensitivityReport:
    """Smallest delta_g whose phase reaches the resolution within one coherence window."""
    cst = config.constants
    delta_g = (
        config.phase_resolution
        * cst.c_squared
        / (cst.earth_radius * config.coherence_time * config.mean_frequency * config.n)
    )
    return SensitivityReport(
        kind="gravimeter",
        config=config,
        phase=config.phase_resolution,
        sensitivity={"delta_g": delta_g, "delta_g_over_g": delta_g / cst.g0},
    )


def closed_form_phase(
    n: float,
    mean_frequency: float,
    spacing: float,
    t: float,
    geometry: GeometryKind = "1d",
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Rotated-chip phase g * mean_omega * spacing * n^p * t / (4 c^2), p = 2 (1D) or 3/2 (2D)."""
    power = 2.0 if geometry == "1d" else 1.5
    return constants.g0 * mean_frequency * spacing * float(n) ** power * t / (4.0 * constants.c_squared)


def required_qubits(config: SensingConfig, geometry: GeometryKind = "1d") -> RequiredQubits:
    """Qubits needed for the rotated-chip phase to reach the resolution in one T_c.

    Inverts the closed forms: n = s^(1/2) for 1D and n = s^(2/3) for 2D,
    with s = 4 * phase_resolution * c^2 / (g * mean_omega * spacing * T_c),
    rounded up.  The chip dimension is n * spacing (1D) or sqrt(n) * spacing (2D).
    """
    if geometry not in ("1d", "2d"):
        raise ValueError(f"geometry must be '1d' or '2d', got {geometry!r}")
    cst = config.constants
    scale = (
        4.0
        * config.phase_resolution
        * cst.c_squared
        / (cst.g0 * config.mean_frequency * config.spacing * config.coherence_time)
    )
    n = math.ceil(scale ** (0.5 if geometry == "1d" else 2.0 / 3.0))
    length = n * config.spacing if geometry == "1d" else math.sqrt(n) * config.spacing
    return RequiredQubits(n=n, length=length, geometry=geometry)


def strain_phase(config: SensingConfig, t: float, strain: float) -> float:
    """Phase g * spacing * mean_omega * n * t / c^2 * (1 + strain) of the strained GHZ register."""
    if not abs(strain) < 1.0:
        raise ValueError(f"|strain| must be < 1, got {strain!r}")
    cst = config.constants
    return (
        cst.g0
        * config.spacing
        * config.mean_frequency
        * config.n
        * t
        / cst.c_squared
        * (1.0 + strain)
    )


def min_detectable_strain(config: SensingConfig) -> SensitivityReport:
    """Strain whose phase contribution over one T_c equals the phase resolution.

    Values far above 1 mean the device cannot compete with existing
    strain gauges (MEMS devices resolve about 1e-6) at this resolution.
    """
    baseline = strain_phase(config, config.coherence_time, 0.0)
    return SensitivityReport(
        kind="strain",
        config=config,
        phase=baseline,
        sensitivity={"min_strain": config.phase_resolution / baseline},
    )
