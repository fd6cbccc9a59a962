"""Physical constants for the weak-field gravity model.

Every constant can be overridden per run, which makes it possible to
reproduce back-of-the-envelope estimates that use round numbers
(g = 9.8 or 10 m/s^2) instead of the defaults below.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the potentials and redshift factors.

    c            speed of light, m/s
    G            gravitational constant, m^3/(kg s^2)
    g0           surface gravitational acceleration, m/s^2
    earth_mass   kg
    earth_radius m
    """

    c: float = 299792458.0
    G: float = 6.6743e-11
    g0: float = 9.80665
    earth_mass: float = 5.972e24
    earth_radius: float = 6.371e6

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0.0:
                raise ValueError(f"constant {f.name} must be strictly positive, got {value!r}")

    @property
    def c_squared(self) -> float:
        return self.c * self.c

    def with_overrides(self, **overrides: float) -> "PhysicalConstants":
        """A copy with some constants replaced (validated again)."""
        return replace(self, **overrides)


DEFAULT_CONSTANTS = PhysicalConstants()
