"""
Physical constants used by every evaluator.

Defaults are the CODATA values shipped with scipy. A different set (for
example reduced units with hbar = k_B = c = 1) must be supplied as a
complete PhysicalConstants instance; there is no per-constant override.
"""

import math
from dataclasses import dataclass

from scipy import constants as codata

from .errors import InvalidParameterError


@dataclass(frozen=True)
class PhysicalConstants:
    """Planck, Boltzmann and light-speed constants in SI units."""

    hbar: float
    k_B: float
    c: float

    def __post_init__(self):
        for name in ("hbar", "k_B", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")

    def thermal_frequency(self, T: float) -> float:
        """Return k_B*T/hbar in rad/s."""
        if not (math.isfinite(T) and T > 0):
            raise InvalidParameterError(f"temperature must be positive, got {T!r}")
        return self.k_B * T / self.hbar

    def thermal_wavelength(self, T: float) -> float:
        """Return 2*pi*hbar*c/(k_B*T), the dominant thermal photon wavelength."""
        return 2.0 * math.pi * self.c / self.thermal_frequency(T)


CODATA = PhysicalConstants(hbar=codata.hbar, k_B=codata.k, c=codata.c)

REDUCED_UNITS = PhysicalConstants(hbar=1.0, k_B=1.0, c=1.0)
