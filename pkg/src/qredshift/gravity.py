"""Gravitational potentials, redshift factors and per-qubit dephasing angles.

The model is first-order weak-field gravity: a qubit sitting at potential
Phi runs at a rate scaled by 1 + Phi/c^2, so a change dPhi of the local
potential detunes an omega-frequency qubit by dPhi * omega / c^2.  Over an
accumulation time t, register site k picks up the phase angle

    theta_k = -(t / c^2) * dPhi_k * omega_k

relative to its calibrated frame.  These angles parameterize the diagonal
dephasing channel consumed by the simulation engines.

Supported perturbations of a calibrated chip:

  * VerticalRotation    rotate the chip about its center of gravity, so
                        site k moves vertically by x_k = u_k * sin(angle)
                        (u_k is the site coordinate along the chip axis);
  * VerticalTranslation move the whole chip up or down by delta_x;
  * UniformDeltaG       change the surface acceleration g -> g + delta_g
                        at fixed Earth radius, dPhi = -R_earth * delta_g;
  * ProximalMass        park a mass M at distance d, dPhi = -G*M/d
                        (common to all sites, point-chip approximation);
  * UniformStrain       stretch the site spacing by a factor (1 + strain)
                        on a chip rotated by `angle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import isqrt
from typing import Sequence, Union

import numpy as np

from .constants import DEFAULT_CONSTANTS, PhysicalConstants

__all__ = [
    "QubitSite",
    "ChipGeometry",
    "line_chip",
    "grid_chip",
    "VerticalRotation",
    "UniformDeltaG",
    "ProximalMass",
    "VerticalTranslation",
    "UniformStrain",
    "GravScenario",
    "DephasingAngles",
    "newtonian_potential",
    "redshift_factor",
    "fractional_shift_vertical",
    "fractional_shift_mass",
    "phase_rate",
    "universal_rate",
    "vertical_displacements",
    "potential_changes",
    "dephasing_angles",
]


@dataclass(frozen=True)
class QubitSite:
    """One register site: 1-based index, angular frequency (rad/s), chip-frame position (m)."""

    index: int
    frequency: float
    chip_position: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"site index must be >= 1, got {self.index}")
        if not self.frequency > 0.0:
            raise ValueError(f"site frequency must be positive, got {self.frequency!r}")


@dataclass(frozen=True)
class ChipGeometry:
    """A line or square-grid chip, rotated by `orientation` about its center of gravity.

    Site coordinates are centered on the center of gravity, so positions sum
    to zero along every axis.  `orientation` is the tilt of the chip axis
    (line axis, or grid row axis) away from horizontal: 0 keeps every site
    at the same height, pi/2 stands the axis fully vertical.

    `frequencies` holds one angular frequency per site; `sites` materializes
    the per-site view on demand (the numerics only touch the arrays).
    """

    layout: str
    qubit_count: int
    spacing: float
    orientation: float
    frequencies: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.layout not in ("line", "grid"):
            raise ValueError(f"layout must be 'line' or 'grid', got {self.layout!r}")
        if self.qubit_count < 1:
            raise ValueError(f"qubit_count must be >= 1, got {self.qubit_count}")
        if self.layout == "grid" and isqrt(self.qubit_count) ** 2 != self.qubit_count:
            raise ValueError(f"grid layout needs a perfect-square qubit count, got {self.qubit_count}")
        if not self.spacing > 0.0:
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")
        freqs = np.asarray(self.frequencies, dtype=float)
        if freqs.shape != (self.qubit_count,):
            raise ValueError(f"expected {self.qubit_count} site frequencies, got shape {freqs.shape}")
        if not np.all(freqs > 0.0):
            raise ValueError("all site frequencies must be positive")
        object.__setattr__(self, "frequencies", freqs)

    def axis_coordinates(self) -> np.ndarray:
        """Chip-frame coordinate of each site along the rotation axis, m.

        Sites are numbered so that site 1 ends up highest after rotating
        the axis to vertical: u_k = (n + 1 - 2k) * spacing / 2 along a
        line; on a grid the same formula runs over the sqrt(n) rows and
        every site of a row shares the row coordinate.
        """
        n, ell = self.qubit_count, self.spacing
        if self.layout == "line":
            k = np.arange(1, n + 1)
            return (n + 1 - 2 * k) * (ell / 2.0)
        m = isqrt(n)
        rows = np.arange(n) // m + 1
        return (m + 1 - 2 * rows) * (ell / 2.0)

    @property
    def sites(self) -> tuple[QubitSite, ...]:
        axis = self.axis_coordinates()
        if self.layout == "line":
            positions = [(float(u),) for u in axis]
        else:
            m = isqrt(self.qubit_count)
            cols = np.arange(self.qubit_count) % m + 1
            across = (m + 1 - 2 * cols) * (self.spacing / 2.0)
            positions = [(float(u), float(v)) for u, v in zip(axis, across)]
        return tuple(
            QubitSite(index=k + 1, frequency=float(w), chip_position=pos)
            for k, (w, pos) in enumerate(zip(self.frequencies, positions))
        )


def _frequency_array(n: int, frequency: float | Sequence[float]) -> np.ndarray:
    arr = np.asarray(frequency, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    return arr


def line_chip(
    n: int,
    spacing: float,
    frequency: float | Sequence[float],
    orientation: float = 0.0,
) -> ChipGeometry:
    """A 1D chip of n sites with uniform spacing; frequency in rad/s (scalar or per site)."""
    return ChipGeometry("line", n, spacing, orientation, _frequency_array(n, frequency))


def grid_chip(
    n: int,
    spacing: float,
    frequency: float | Sequence[float],
    orientation: float = 0.0,
) -> ChipGeometry:
    """A square-grid chip of n sites (n must be a perfect square)."""
    return ChipGeometry("grid", n, spacing, orientation, _frequency_array(n, frequency))


@dataclass(frozen=True)
class VerticalRotation:
    """Rotate the calibrated chip by `angle` (rad) about its center of gravity."""

    angle: float


@dataclass(frozen=True)
class UniformDeltaG:
    """Change the local surface acceleration by delta_g (m/s^2) at fixed Earth radius."""

    delta_g: float


@dataclass(frozen=True)
class ProximalMass:
    """Bring a mass (kg) to distance (m) from the chip; all sites share the distance."""

    mass: float
    distance: float

    def __post_init__(self) -> None:
        if not self.distance > 0.0:
            raise ValueError(f"proximal-mass distance must be positive, got {self.distance!r}")


@dataclass(frozen=True)
class VerticalTranslation:
    """Move the whole chip vertically by delta_x (m)."""

    delta_x: float


@dataclass(frozen=True)
class UniformStrain:
    """Stretch site spacings by (1 + strain) on a chip rotated by `angle` (rad)."""

    strain: float
    angle: float = math.pi / 2.0

    def __post_init__(self) -> None:
        if not abs(self.strain) < 1.0:
            raise ValueError(f"|strain| must be < 1, got {self.strain!r}")


Perturbation = Union[VerticalRotation, UniformDeltaG, ProximalMass, VerticalTranslation, UniformStrain]


@dataclass(frozen=True)
class GravScenario:
    """One perturbation applied to a calibrated chip, plus the constants to use."""

    geometry: ChipGeometry
    perturbation: Perturbation
    constants: PhysicalConstants = DEFAULT_CONSTANTS


@dataclass(frozen=True)
class DephasingAngles:
    """Per-site phase angles theta_k (rad) accumulated over `time` (s)."""

    angles: np.ndarray
    time: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.angles, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("dephasing angles must be finite")
        object.__setattr__(self, "angles", arr)

    def __len__(self) -> int:
        return self.angles.size


def newtonian_potential(
    mass: float, distance: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Newtonian potential -G*M/r (m^2/s^2) of `mass` at `distance`."""
    if not distance > 0.0:
        raise ValueError(f"distance must be positive, got {distance!r}")
    return -constants.G * mass / distance


def redshift_factor(potential: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Clock-rate multiplier 1 + Phi/c^2 at potential Phi (first order in 1/c^2)."""
    if not abs(potential) < constants.c_squared:
        raise ValueError("weak-field form requires |potential| < c^2")
    return 1.0 + potential / constants.c_squared


def fractional_shift_vertical(
    delta_x: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Fractional frequency shift g*dx/c^2 from raising a qubit by delta_x."""
    return constants.g0 * delta_x / constants.c_squared


def fractional_shift_mass(
    mass: float, distance: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Fractional frequency shift -G*M/(d*c^2) from a proximal mass; never positive for M >= 0."""
    if not distance > 0.0:
        raise ValueError(f"distance must be positive, got {distance!r}")
    return -constants.G * mass / (distance * constants.c_squared)


def phase_rate(
    delta_x: float, omega: float, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Phase drift rate g*omega*dx/c^2 (rad/s) between paths separated vertically by delta_x."""
    return constants.g0 * omega * delta_x / constants.c_squared


def universal_rate(
    engineering_factor: float = 1.0, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Frequency-independent dephasing rate N*g/c (rad/s).

    Holds when the qubit spacing tracks the wavelength, dx = N*c/omega,
    with N a dimensionless layout factor (waveguide geometry, index of
    refraction); the frequency then cancels out of the phase rate.
    """
    if not engineering_factor > 0.0:
        raise ValueError(f"engineering factor must be positive, got {engineering_factor!r}")
    return engineering_factor * constants.g0 / constants.c


def vertical_displacements(geometry: ChipGeometry, angle: float | None = None) -> np.ndarray:
    """Height change x_k of each site (m) after rotating the chip axis by `angle`.

    Defaults to the geometry's own orientation.  The rotation pivots on the
    center of gravity, so the displacements always sum to zero.
    """
    tilt = geometry.orientation if angle is None else angle
    return geometry.axis_coordinates() * math.sin(tilt)


def potential_changes(scenario: GravScenario) -> np.ndarray:
    """Per-site change dPhi_k (m^2/s^2) of the local potential under the scenario."""
    cst = scenario.constants
    geom = scenario.geometry
    pert = scenario.perturbation
    if isinstance(pert, VerticalRotation):
        return cst.g0 * vertical_displacements(geom, pert.angle)
    if isinstance(pert, VerticalTranslation):
        return np.full(geom.qubit_count, cst.g0 * pert.delta_x)
    if isinstance(pert, UniformDeltaG):
        return np.full(geom.qubit_count, -cst.earth_radius * pert.delta_g)
    if isinstance(pert, ProximalMass):
        return np.full(geom.qubit_count, -cst.G * pert.mass / pert.distance)
    if isinstance(pert, UniformStrain):
        return cst.g0 * vertical_displacements(geom, pert.angle) * (1.0 + pert.strain)
    raise TypeError(f"unknown perturbation type {type(pert).__name__}")


def dephasing_angles(scenario: GravScenario, t: float) -> DephasingAngles:
    """Channel angles theta_k = -(t/c^2) * dPhi_k * omega_k after accumulating for t seconds.

    The minus sign matches the convention that a raised qubit (dPhi > 0)
    runs fast, so its excited state advances and the recorded angle for
    the rotation scenario is theta_k = -(g t / c^2) * omega_k * x_k.
    """
    if t < 0.0:
        raise ValueError(f"accumulation time must be >= 0, got {t!r}")
    dphi = potential_changes(scenario)
    theta = -(t / scenario.constants.c_squared) * dphi * scenario.geometry.frequencies
    return DephasingAngles(angles=theta, time=t)
