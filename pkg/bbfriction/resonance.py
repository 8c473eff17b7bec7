"""
Closed forms for a particle with a single zero-width absorption line.

Forces here are normalized to hbar*V*alpha0*omega0^5/(3c^5) and depend only
on the rotation ratio u = Omega/omega0, the reduced inverse temperature
chi = hbar*omega0/(2*k_B*T2) and the tilt theta.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .constants import CODATA, PhysicalConstants
from .errors import InvalidParameterError
from .physics_core import BathSpec, PolarizabilityModel, reduced_chi
from .special_utils import inv_sinh2

logger = logging.getLogger(__name__)

SMALL_CHI = 1e-3
NEAR_LINE = 1e-4
DEFAULT_FIG2_CHI = (1.5, 2.0, 2.5, 3.0)
FIG2_U_MAX = 1.5

# G(chi) is scanned on this grid to bracket its sign changes
_WINDOW_SCAN = np.linspace(0.5, 10.0, 96)
_ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class ResonanceParams:
    u: float
    chi: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.u) and self.u >= 0):
            raise InvalidParameterError(f"u must be non-negative, got {self.u!r}")
        if not (math.isfinite(self.chi) and self.chi > 0):
            raise InvalidParameterError(f"chi must be positive, got {self.chi!r}")
        if not math.isfinite(self.theta):
            raise InvalidParameterError(f"theta must be finite, got {self.theta!r}")


class Fig2Row(NamedTuple):
    chi: float
    u: float
    f_quadratic: float
    f_exact: float


def _check_chi(chi: float) -> float:
    if not (math.isfinite(chi) and chi > 0):
        raise InvalidParameterError(f"chi must be positive, got {chi!r}")
    return float(chi)


def rotation_correction_G(chi: float) -> float:
    """G(chi) = 2 - 2 chi coth(chi) + 0.6 chi^2 coth^2(chi) - 0.2 chi^2.

    Negative G means fast enough rotation turns friction into acceleration.
    """
    chi = _check_chi(chi)
    if chi < SMALL_CHI:
        return 0.6 - (7.0 / 15.0) * chi * chi
    x = chi / math.tanh(chi)
    return 2.0 - 2.0 * x + 0.6 * x * x - 0.2 * chi * chi


def resonance_force_quadratic(params: ResonanceParams) -> float:
    """Normalized force to second order in u: -(chi/sinh^2 chi)*[1 + u^2 (3+cos^2 theta) G(chi)]."""
    chi = params.chi
    c2 = math.cos(params.theta) ** 2
    return -chi * inv_sinh2(chi) * (1.0 + params.u ** 2 * (3.0 + c2) * rotation_correction_G(chi))


def _line_term(s: float, chi: float) -> float:
    """s^5/sinh^2(chi*s), continued through s = 0 by its Taylor form."""
    if abs(s) < NEAR_LINE:
        return s ** 3 / chi ** 2 * (1.0 - (chi * s) ** 2 / 3.0)
    return s ** 5 * inv_sinh2(chi * s)


def resonance_force_exact(params: ResonanceParams) -> float:
    """Normalized force to all orders in u.

    f = -(chi/10) * { 2(1+sin^2 theta)/sinh^2 chi
                      + (3+cos^2 theta) [ (1-u)^5/sinh^2(chi(1-u)) + (1+u)^5/sinh^2(chi(1+u)) ] }

    The derivation is in DERIVATIONS.md.
    """
    chi, u = params.chi, params.u
    s2 = math.sin(params.theta) ** 2
    c2 = math.cos(params.theta) ** 2
    lines = _line_term(1.0 - u, chi) + _line_term(1.0 + u, chi)
    return -(chi / 10.0) * (2.0 * (1.0 + s2) * inv_sinh2(chi) + (3.0 + c2) * lines)


def acceleration_threshold(chi: float, theta: float = 0.0) -> Optional[float]:
    """Smallest u at which the quadratic force changes sign, or None when G(chi) >= 0."""
    G = rotation_correction_G(chi)
    if G >= 0:
        return None
    return 1.0 / math.sqrt(-(3.0 + math.cos(theta) ** 2) * G)


def acceleration_window() -> Tuple[float, float]:
    """The two roots of G bounding the chi range where rotation can accelerate.

    Returns:
        (chi_lo, chi_hi)
    """
    values = [rotation_correction_G(x) for x in _WINDOW_SCAN]
    roots = []
    for left, right, g_left, g_right in zip(_WINDOW_SCAN[:-1], _WINDOW_SCAN[1:], values[:-1], values[1:]):
        if g_left == 0.0:
            roots.append(float(left))
        elif g_left * g_right < 0:
            roots.append(bisect(rotation_correction_G, left, right, xtol=_ROOT_XTOL))
    if len(roots) != 2:
        raise RuntimeError(f"expected two sign changes of G, found {len(roots)}")
    logger.debug(f"acceleration window chi in ({roots[0]:.6f}, {roots[1]:.6f})")
    return roots[0], roots[1]


def lowest_threshold(theta: float = 0.0) -> Tuple[float, float]:
    """Temperature at which the least rotation suffices to accelerate.

    Minimizes G over the acceleration window.

    Returns:
        (chi_opt, u_star) with u_star the threshold at chi_opt
    """
    chi_lo, chi_hi = acceleration_window()
    result = minimize_scalar(rotation_correction_G, bounds=(chi_lo, chi_hi), method="bounded",
                             options={"xatol": 1e-10})
    chi_opt = float(result.x)
    return chi_opt, acceleration_threshold(chi_opt, theta)


def fig2_curves(u_grid: Sequence[float], chi_list: Sequence[float] = DEFAULT_FIG2_CHI,
                theta: float = 0.0) -> List[Fig2Row]:
    """Normalized force curves versus u, chi-major then u-minor.

    Args:
        u_grid: Rotation ratios within [0, 1.5]
        chi_list: Reduced inverse temperatures
        theta: Rotation-axis tilt

    Returns:
        List of Fig2Row(chi, u, f_quadratic, f_exact)
    """
    u_values = [float(u) for u in u_grid]
    if any(not (0.0 <= u <= FIG2_U_MAX) for u in u_values):
        raise InvalidParameterError(f"u_grid must lie within [0, {FIG2_U_MAX}]")
    rows = []
    for chi in chi_list:
        chi = _check_chi(float(chi))
        for u in u_values:
            params = ResonanceParams(u=u, chi=chi, theta=theta)
            rows.append(Fig2Row(chi, u, resonance_force_quadratic(params), resonance_force_exact(params)))
    return rows


def linear_drag_coefficient(model: PolarizabilityModel, bath: BathSpec) -> float:
    """Linear drag kappa with F' = -kappa*V for a slow, non-rotating resonant particle.

    kappa = hbar*alpha0*omega0^5*chi/(3 c^5 sinh^2 chi)
    """
    consts = bath.constants
    chi = reduced_chi(model.omega0, bath.T2, consts)
    return consts.hbar * model.alpha0 * model.omega0 ** 5 * chi * inv_sinh2(chi) / (3.0 * consts.c ** 5)


def resonance_force_nonrel(V: float, Omega: float, theta: float, model: PolarizabilityModel, T2: float,
                           constants: PhysicalConstants = CODATA) -> float:
    """Slow-motion force (newtons) of a resonant particle from the exact closed form."""
    if not (math.isfinite(V) and V >= 0):
        raise InvalidParameterError(f"V must be non-negative, got {V!r}")
    params = ResonanceParams(u=Omega / model.omega0, chi=reduced_chi(model.omega0, T2, constants), theta=theta)
    scale = constants.hbar * V * model.alpha0 * model.omega0 ** 5 / (3.0 * constants.c ** 5)
    return scale * resonance_force_exact(params)
