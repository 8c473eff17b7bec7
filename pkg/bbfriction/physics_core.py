"""
Physics core: polarizability models, bath/particle/kinematic specifications
and the validity checks of the point-dipole picture.

Temperatures enter in kelvin and are converted once to thermal frequencies
w = k_B*T/hbar; everything downstream works in rad/s.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Tuple

import numpy as np

from .constants import CODATA, PhysicalConstants
from .errors import InvalidParameterError, UnsupportedEvaluationError
from .special_utils import SERIES_SWITCH, _like

logger = logging.getLogger(__name__)

# Dipole picture thresholds: rim speed and size relative to thermal wavelength
ROTATION_SPEED_LIMIT = 0.1
SIZE_LIMIT = 0.1


class ModelKind(str, Enum):
    SMOOTH = "smooth"
    DELTA_RESONANCE = "delta_resonance"


def _require_positive(name: str, value: float) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a number, got {value!r}") from None
    if not (math.isfinite(number) and number > 0):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value!r}")
    return number


@dataclass(frozen=True)
class PolarizabilityModel(ABC):
    """Interface for the imaginary part of a scalar polarizability.

    Implementations provide alpha''(omega) in volume units. alpha'' must be
    odd, positive for omega > 0, and alpha''(omega)/omega must have a finite
    positive limit at the origin. Integrals over all frequencies assume
    alpha'' = O(omega**-3) at infinity.
    """

    alpha0: float
    omega0: float

    def __post_init__(self):
        _require_positive("alpha0", self.alpha0)
        _require_positive("omega0", self.omega0)

    @property
    @abstractmethod
    def kind(self) -> ModelKind:
        ...

    @property
    def resonances(self) -> Tuple[float, ...]:
        """Positive frequencies where alpha'' is sharply peaked."""
        return (self.omega0,)

    @abstractmethod
    def alpha_imag(self, omega):
        """alpha''(omega), odd in omega."""

    @abstractmethod
    def alpha_imag_ratio(self, omega):
        """alpha''(omega)/omega, even and finite at the origin."""

    @property
    def slope_at_zero(self) -> float:
        return float(self.alpha_imag_ratio(0.0))


@dataclass(frozen=True)
class LorentzModel(PolarizabilityModel):
    """Damped oscillator: alpha = alpha0*w0^2 / (w0^2 - w^2 - i*gamma_d*w)."""

    gamma_d: float

    def __post_init__(self):
        super().__post_init__()
        _require_positive("gamma_d", self.gamma_d)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.SMOOTH

    def alpha_imag_ratio(self, omega):
        omega = np.asarray(omega, dtype=float)
        w0sq = self.omega0 * self.omega0
        detuning = w0sq - omega * omega
        out = self.alpha0 * w0sq * self.gamma_d / (detuning * detuning + (self.gamma_d * omega) ** 2)
        return _like(omega, out)

    def alpha_imag(self, omega):
        # Built from the ratio so that alpha''(g) and g*ratio(g) round identically
        omega = np.asarray(omega, dtype=float)
        return _like(omega, omega * self.alpha_imag_ratio(omega))


@dataclass(frozen=True)
class DeltaResonanceModel(PolarizabilityModel):
    """alpha'' = (pi/2)*alpha0*omega0*[delta(w - w0) - delta(w + w0)].

    A distribution: only the closed forms in bbfriction.resonance use it.
    """

    @property
    def kind(self) -> ModelKind:
        return ModelKind.DELTA_RESONANCE

    def alpha_imag(self, omega):
        raise UnsupportedEvaluationError(
            "delta-resonance polarizability cannot be evaluated pointwise; use bbfriction.resonance"
        )

    def alpha_imag_ratio(self, omega):
        return self.alpha_imag(omega)

    @property
    def slope_at_zero(self) -> float:
        return 0.0


def make_lorentz_model(alpha0: float, omega0: float, gamma_d: float) -> LorentzModel:
    """Create a Lorentz oscillator model.

    Args:
        alpha0: Static polarizability (m^3)
        omega0: Resonance frequency (rad/s)
        gamma_d: Damping rate (rad/s)

    Returns:
        LorentzModel instance
    """
    return LorentzModel(alpha0=alpha0, omega0=omega0, gamma_d=gamma_d)


def make_delta_model(alpha0: float, omega0: float) -> DeltaResonanceModel:
    """Create the zero-width resonance model used by the closed forms."""
    return DeltaResonanceModel(alpha0=alpha0, omega0=omega0)


def require_smooth(model: PolarizabilityModel) -> PolarizabilityModel:
    if model.kind is not ModelKind.SMOOTH:
        raise UnsupportedEvaluationError(
            f"{type(model).__name__} is a distribution; numerical evaluators need a smooth model"
        )
    return model


def alpha_imag(model: PolarizabilityModel, omega):
    """Return alpha''(omega) for a smooth model."""
    return model.alpha_imag(omega)


def alpha_imag_coth_w(model: PolarizabilityModel, omega, w_T: float):
    """alpha''(omega)*coth(omega/(2*w_T)) with w_T a thermal frequency in rad/s."""
    omega = np.asarray(omega, dtype=float)
    y = omega / (2.0 * w_T)
    ratio = model.alpha_imag_ratio(omega)
    series = ratio * (2.0 * w_T) * (1.0 + y * y / 3.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = omega * ratio / np.tanh(y)
    out = np.where(np.abs(y) < SERIES_SWITCH, series, direct)
    return _like(omega, out)


def alpha_imag_coth(model: PolarizabilityModel, omega, T: float, constants: PhysicalConstants = CODATA):
    """Return alpha''(omega)*coth(hbar*omega/(2*k_B*T)).

    Even in omega and finite at omega = 0, where it equals
    (2*k_B*T/hbar) times the slope of alpha'' at the origin.
    """
    require_smooth(model)
    return alpha_imag_coth_w(model, omega, constants.thermal_frequency(T))


def reduced_chi(omega0: float, T2: float, constants: PhysicalConstants = CODATA) -> float:
    """Reduced inverse temperature chi = hbar*omega0/(2*k_B*T2)."""
    _require_positive("omega0", omega0)
    return omega0 / (2.0 * constants.thermal_frequency(T2))


@dataclass(frozen=True)
class BathSpec:
    """Isotropic blackbody background at temperature T2 (K)."""

    T2: float
    constants: PhysicalConstants = field(default=CODATA)

    def __post_init__(self):
        _require_positive("T2", self.T2)

    @property
    def w_T2(self) -> float:
        return self.constants.thermal_frequency(self.T2)


@dataclass(frozen=True)
class ParticleSpec:
    mass: float
    radius: float
    T1: float
    model: PolarizabilityModel

    def __post_init__(self):
        _require_positive("mass", self.mass)
        _require_positive("radius", self.radius)
        _require_positive("T1", self.T1)
        if not isinstance(self.model, PolarizabilityModel):
            raise InvalidParameterError(f"model must be a PolarizabilityModel, got {type(self.model).__name__}")


@dataclass(frozen=True)
class KinematicState:
    """Velocity, rotation rate and tilt of the rotation axis.

    theta is the angle between the rotation axis and the velocity; the axis
    itself is never stored as a vector.
    """

    beta: float
    Omega: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and 0.0 <= self.beta < 1.0):
            raise InvalidParameterError(f"beta must lie in [0, 1), got {self.beta!r}")
        if not (math.isfinite(self.Omega) and self.Omega >= 0.0):
            raise InvalidParameterError(f"Omega must be non-negative, got {self.Omega!r}")
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= math.pi):
            raise InvalidParameterError(f"theta must lie in [0, pi], got {self.theta!r}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    def with_beta(self, beta: float) -> "KinematicState":
        return replace(self, beta=beta)


def validate_dipole_conditions(particle: ParticleSpec, bath: BathSpec, state: KinematicState) -> List[str]:
    """Check that the particle can be treated as a point dipole.

    Never raises; every violation is logged and returned.

    Returns:
        List of warning messages (empty when all conditions hold)
    """
    consts = bath.constants
    warnings = []

    rim_speed = state.Omega * particle.radius / consts.c
    if rim_speed > ROTATION_SPEED_LIMIT:
        warnings.append(
            f"rotation too fast for the dipole picture: Omega*R/c = {rim_speed:.3g} > {ROTATION_SPEED_LIMIT}"
        )

    for label, T in (("T1", particle.T1), ("T2", bath.T2)):
        wavelength = consts.thermal_wavelength(T)
        if particle.radius > SIZE_LIMIT * wavelength:
            warnings.append(
                f"particle too large for the dipole picture at {label}={T:g} K: "
                f"R = {particle.radius:.3g} m > {SIZE_LIMIT} * {wavelength:.3g} m"
            )

    for message in warnings:
        logger.warning(f"⚠️ {message}")
    return warnings
