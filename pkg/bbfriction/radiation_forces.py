"""
Force and heating evaluators for a rotating dipole in blackbody radiation.

Three routes to the frictional force are provided and cross-check each other:

- force_comoving: the co-moving frame force, folded onto omega > 0 with the
  coth factor rewritten as 1 + 2*Bose (the vacuum part drops out), so the
  outer integrand carries an explicit exp(-gamma*(1-beta)*omega/w_T2) envelope.
- force_lab / heating_rate_lab: the lab-frame force and heating rate as
  two-sided double integrals, combined by force_comoving_from_lab.
- force_nonrel / force_mkrtchian: the first-order-in-velocity limits.

All inner math runs on thermal frequencies w = k_B*T/hbar (rad/s).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional

import numpy as np

from .constants import CODATA, PhysicalConstants
from .errors import InvalidParameterError
from .physics_core import (
    BathSpec,
    KinematicState,
    ParticleSpec,
    PolarizabilityModel,
    require_smooth,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    QuadResult,
    integrate_finite,
    integrate_semi_infinite,
)
from .special_utils import bose, coth, inv_sinh2, xcoth_tail

logger = logging.getLogger(__name__)

# Lab-frame truncation: omega_max = LAB_CUTOFF_FACTOR/(1-beta) * slowest scale
LAB_CUTOFF_FACTOR = 20.0
# Two-sided diagnostic of the folded integral: cutoff in units of the envelope scale
DIRECT_CUTOFF_EFOLDS = 40.0


class ForceEstimate(NamedTuple):
    value: float
    error: float
    converged: bool = True


@dataclass(frozen=True)
class ForceBreakdown:
    """Lab-frame force and heating plus both co-moving force estimates.

    F_prime_x comes from the folded co-moving integral, F_prime_from_lab from
    the frame combination of F_x and Q_dot. f_normalized is F_prime_x in
    units of hbar*V*alpha0*omega0^5/(3c^5); it is None when the model has no
    resonance frequency.
    """

    F_x: float
    Q_dot: float
    F_prime_x: float
    F_prime_from_lab: float
    F_x_error: float
    Q_dot_error: float
    F_prime_x_error: float
    F_prime_from_lab_error: float
    f_normalized: Optional[float]
    converged: bool


class _InnerLedger:
    """Inner-integral errors keyed by outer node, plus their combined convergence flag.

    node_error is handed to the outer integrator, which integrates these
    errors with its own weights over the final partition.
    """

    __slots__ = ("errors", "converged")

    def __init__(self):
        self.errors = {}
        self.converged = True

    def record(self, node: float, weighted_error: float, converged: bool) -> None:
        self.errors[float(node)] = abs(weighted_error)
        self.converged = self.converged and converged

    def node_error(self, nodes):
        nodes = np.asarray(nodes, dtype=float)
        flat = [self.errors.get(float(x), 0.0) for x in nodes.ravel()]
        return np.array(flat, dtype=float).reshape(nodes.shape)


def weight_lab(beta: float, mu, theta: float):
    """Angular weights (W1, W2) of the lab-frame integrands."""
    mu = np.asarray(mu, dtype=float)
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    transverse = (1.0 - beta * beta) * (1.0 - mu * mu)
    longitudinal = (1.0 + beta * beta) * (1.0 + mu * mu) + 4.0 * beta * mu
    W1 = transverse * c2 + longitudinal * s2 / 2.0
    W2 = transverse * s2 + longitudinal * (1.0 + c2) / 2.0
    return W1, W2


def weight_comoving(mu, theta: float):
    """Angular weights (A, B) of the co-moving integrand; both even in mu."""
    mu = np.asarray(mu, dtype=float)
    c2 = math.cos(theta) ** 2
    s2 = math.sin(theta) ** 2
    A = (1.0 - mu * mu) * c2 + 0.5 * (1.0 + mu * mu) * s2
    B = (1.0 - mu * mu) * s2 + 0.5 * (1.0 + mu * mu) * (1.0 + c2)
    return A, B


def _weight_selector(weight: str):
    if weight not in ("A", "B"):
        raise InvalidParameterError(f"weight must be 'A' or 'B', got {weight!r}")
    index = 0 if weight == "A" else 1
    return lambda mu, theta: weight_comoving(mu, theta)[index]


def _check_beta(beta: float) -> float:
    if not (math.isfinite(beta) and 0.0 <= beta < 1.0):
        raise InvalidParameterError(f"beta must lie in [0, 1), got {beta!r}")
    return float(beta)


def _bose_moment(weights: Callable, omega: float, beta: float, gamma: float, w2: float,
                 cfg: QuadratureConfig) -> QuadResult:
    """2 * integral of mu*weights(mu)*Bose(gamma*omega*(1+beta*mu)/w2) over [-1, 1]."""
    scale = gamma * omega / w2

    def integrand(mu):
        return 2.0 * mu * weights(mu) * bose(scale * (1.0 + beta * mu))

    return integrate_finite(integrand, -1.0, 1.0, cfg)


def kernel_K(weight: str, omega: float, beta: float, theta: float, T2: float,
             cfg: Optional[QuadratureConfig] = None,
             constants: PhysicalConstants = CODATA) -> QuadResult:
    """Bose-factor angular kernel K_X(omega) of the folded co-moving force.

    K_X(omega) = 2 * int_{-1}^{1} mu*X(mu, theta) / (exp(hbar*gamma*omega*(1+beta*mu)/k_B*T2) - 1) dmu

    Args:
        weight: "A" or "B"
        omega: Frequency in rad/s, strictly positive
        beta: Velocity in units of c
        theta: Rotation-axis tilt in radians
        T2: Bath temperature in K
        cfg: Quadrature settings for the mu-integral
        constants: Physical constants

    Returns:
        QuadResult holding the dimensionless kernel
    """
    cfg = cfg or DEFAULT_QUADRATURE
    beta = _check_beta(beta)
    if not (math.isfinite(omega) and omega > 0):
        raise InvalidParameterError(f"omega must be positive, got {omega!r}")
    select = _weight_selector(weight)
    if beta == 0.0:
        return QuadResult(value=0.0, error_estimate=0.0, subdivisions_used=0, converged=True)
    gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
    w2 = constants.thermal_frequency(T2)
    return _bose_moment(lambda mu: select(mu, theta), omega, beta, gamma, w2, cfg.with_breakpoints(()))


def kernel_K_direct(weight: str, omega: float, beta: float, theta: float, T2: float,
                    cfg: Optional[QuadratureConfig] = None,
                    constants: PhysicalConstants = CODATA) -> QuadResult:
    """Kernel from its coth definition, int mu*X*coth(...) dmu, for any omega != 0.

    Diagnostic path: agrees with kernel_K for omega > 0 and is odd in omega.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    beta = _check_beta(beta)
    if not (math.isfinite(omega) and omega != 0):
        raise InvalidParameterError(f"omega must be finite and non-zero, got {omega!r}")
    select = _weight_selector(weight)
    gamma = 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))
    half_scale = gamma * omega / (2.0 * constants.thermal_frequency(T2))

    def integrand(mu):
        return mu * select(mu, theta) * coth(half_scale * (1.0 + beta * mu))

    return integrate_finite(integrand, -1.0, 1.0, cfg.with_breakpoints(()))


def _comoving_peaks(model: PolarizabilityModel, Omega: float) -> List[float]:
    peaks = set()
    for r in model.resonances:
        for p in (r, r + Omega, abs(r - Omega)):
            if p > 0:
                peaks.add(p)
    return sorted(peaks)


def force_comoving(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                   cfg: Optional[QuadratureConfig] = None) -> ForceEstimate:
    """Frictional force in the particle's instantaneous rest frame.

    F' = (hbar/4 pi c^4) * int_0^inf omega^4 [2 a''(w) K_A(w) + (a''(w+Omega) + a''(w-Omega)) K_B(w)] dw

    Both kernels are evaluated in one mu-integral with the combined weight.
    The result does not depend on the particle temperature. At beta = 0 it
    is exactly zero.

    Returns:
        ForceEstimate in newtons
    """
    cfg = cfg or DEFAULT_QUADRATURE
    model = require_smooth(particle.model)
    if state.beta == 0.0:
        return ForceEstimate(0.0, 0.0, True)

    consts = bath.constants
    beta, gamma, Omega = state.beta, state.gamma, state.Omega
    w2 = bath.w_T2
    theta = state.theta
    inner_cfg = cfg.with_breakpoints(())
    ledger = _InnerLedger()

    def outer(omegas):
        omegas = np.asarray(omegas, dtype=float)
        out = np.empty(omegas.shape)
        for index, w in np.ndenumerate(omegas):
            direct = 2.0 * model.alpha_imag(w)
            shifted = model.alpha_imag(w + Omega) + model.alpha_imag(w - Omega)

            def weights(mu):
                A, B = weight_comoving(mu, theta)
                return direct * A + shifted * B

            inner = _bose_moment(weights, w, beta, gamma, w2, inner_cfg)
            w4 = w ** 4
            ledger.record(w, w4 * inner.error_estimate, inner.converged)
            out[index] = w4 * inner.value
        return out

    result = integrate_semi_infinite(
        outer,
        decay_rate=gamma * (1.0 - beta) / w2,
        cfg=cfg.with_breakpoints(_comoving_peaks(model, Omega)),
        node_error=ledger.node_error,
    )
    prefactor = consts.hbar / (4.0 * math.pi * consts.c ** 4)
    error = prefactor * result.error_estimate
    converged = result.converged and ledger.converged
    if not converged:
        logger.warning(f"⚠️ force_comoving did not converge at beta={beta:g} (error {error:.3e} N)")
    return ForceEstimate(prefactor * result.value, error, converged)


def force_comoving_direct(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                          cfg: Optional[QuadratureConfig] = None,
                          cutoff: Optional[float] = None) -> ForceEstimate:
    """Unfolded two-sided co-moving integral with raw coth factors.

    Regression check for force_comoving; only reliable at moderate cutoffs,
    where the large-omega cancellation is still resolvable.

    Args:
        cutoff: Symmetric truncation in rad/s; defaults to DIRECT_CUTOFF_EFOLDS
                envelope lengths beyond the slowest scale
    """
    cfg = cfg or DEFAULT_QUADRATURE
    model = require_smooth(particle.model)
    if state.beta == 0.0:
        return ForceEstimate(0.0, 0.0, True)

    consts = bath.constants
    beta, gamma, Omega, theta = state.beta, state.gamma, state.Omega, state.theta
    w2 = bath.w_T2
    if cutoff is None:
        cutoff = DIRECT_CUTOFF_EFOLDS * w2 / (gamma * (1.0 - beta)) + max(model.resonances) + Omega
    inner_cfg = cfg.with_breakpoints(())
    ledger = _InnerLedger()

    def outer(omegas):
        omegas = np.asarray(omegas, dtype=float)
        out = np.empty(omegas.shape)
        for index, w in np.ndenumerate(omegas):
            a_direct = model.alpha_imag(w)
            a_shifted = model.alpha_imag(w + Omega)
            half_scale = gamma * w / (2.0 * w2)

            def integrand(mu):
                A, B = weight_comoving(mu, theta)
                return mu * coth(half_scale * (1.0 + beta * mu)) * (A * a_direct + B * a_shifted)

            inner = integrate_finite(integrand, -1.0, 1.0, inner_cfg)
            w4 = w ** 4
            ledger.record(w, w4 * inner.error_estimate, inner.converged)
            out[index] = w4 * inner.value
        return out

    points = {0.0}
    for r in model.resonances:
        for p in (r, -r, r - Omega, -r - Omega):
            if abs(p) < cutoff:
                points.add(p)
    result = integrate_finite(outer, -cutoff, cutoff, cfg.with_breakpoints(sorted(points)), ledger.node_error)
    prefactor = consts.hbar / (4.0 * math.pi * consts.c ** 4)
    error = prefactor * result.error_estimate
    return ForceEstimate(prefactor * result.value, error, result.converged and ledger.converged)


def lab_braces(omega: float, mu, state: KinematicState, model: PolarizabilityModel, w1: float, w2: float):
    """Finite forms of the two coth-difference factors of the lab integrands.

    Returns (b1, b2s) with
        b1  = a''(g) * [coth(omega/2w2) - coth(g/2w1)]
        b2s = omega * a''(g2) * [coth(omega/2w2) - coth(g2/2w1)]
    where g = gamma*omega*(1+beta*mu) and g2 = g + Omega. The vacuum parts
    of the coth factors are separated analytically, leaving the decaying
    xcoth_tail terms, so both factors are finite at omega = 0 and never lose
    digits to cancellation at large omega. For beta = 0, Omega = 0 and
    w1 = w2 both vanish exactly.
    """
    mu = np.asarray(mu, dtype=float)
    q = state.gamma * (1.0 + state.beta * mu)
    g = q * omega
    g2 = g + state.Omega
    tail_bath = xcoth_tail(omega / (2.0 * w2))

    ratio_g = model.alpha_imag_ratio(g)
    b1 = ratio_g * (q * (2.0 * w2) * tail_bath - (2.0 * w1) * xcoth_tail(g / (2.0 * w1)))

    ratio_g2 = model.alpha_imag_ratio(g2)
    alpha_g2 = g2 * ratio_g2
    b2s = (
        alpha_g2 * (2.0 * w2) * tail_bath
        - (omega * ratio_g2) * (2.0 * w1) * xcoth_tail(g2 / (2.0 * w1))
        + omega * alpha_g2 * (np.sign(omega) - np.sign(g2))
    )
    return b1, b2s


def _lab_inner_breakpoints(model: PolarizabilityModel, state: KinematicState, omega: float) -> List[float]:
    if state.beta == 0.0 or omega == 0.0:
        return []
    scale = state.gamma * omega
    points = []
    targets = [t for r in model.resonances for t in (r, -r)]
    for target in targets:
        points.append((target / scale - 1.0) / state.beta)
        points.append(((target - state.Omega) / scale - 1.0) / state.beta)
    points.append(((-state.Omega) / scale - 1.0) / state.beta)
    return sorted(p for p in set(points) if -1.0 < p < 1.0)


def _lab_outer_breakpoints(model: PolarizabilityModel, state: KinematicState, omega_max: float) -> List[float]:
    points = {0.0}
    targets = [-state.Omega]
    for r in model.resonances:
        targets += [r, -r, r - state.Omega, -r - state.Omega]
    for target in targets:
        for stretch in (1.0 - state.beta, 1.0 + state.beta):
            p = target / (state.gamma * stretch)
            if abs(p) < omega_max:
                points.add(p)
    return sorted(points)


def _lab_integral(projection: Callable, state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                  cfg: QuadratureConfig) -> QuadResult:
    """Two-sided double integral shared by the lab-frame force and heating rate.

    projection(mu) is mu for the force and 1 + beta*mu for the heating rate.
    The error estimate includes the propagated inner errors and a bound on
    the part of the integrand cut off beyond +-omega_max.
    """
    model = require_smooth(particle.model)
    beta, theta = state.beta, state.theta
    w1 = bath.constants.thermal_frequency(particle.T1)
    w2 = bath.w_T2
    omega_max = LAB_CUTOFF_FACTOR / (1.0 - beta) * max(w1, w2, state.Omega, *model.resonances)
    inner_cfg = cfg.with_breakpoints(())
    ledger = _InnerLedger()

    def outer(omegas):
        omegas = np.asarray(omegas, dtype=float)
        out = np.empty(omegas.shape)
        for index, w in np.ndenumerate(omegas):
            w3 = w ** 3
            w4 = w3 * w

            def integrand(mu):
                W1, W2 = weight_lab(beta, mu, theta)
                b1, b2s = lab_braces(w, mu, state, model, w1, w2)
                return projection(mu) * (w4 * W1 * b1 + w3 * W2 * b2s)

            inner = integrate_finite(
                integrand, -1.0, 1.0,
                inner_cfg.with_breakpoints(_lab_inner_breakpoints(model, state, w)),
            )
            ledger.record(w, inner.error_estimate, inner.converged)
            out[index] = inner.value
        return out

    result = integrate_finite(
        outer, -omega_max, omega_max,
        cfg.with_breakpoints(_lab_outer_breakpoints(model, state, omega_max)),
        node_error=ledger.node_error,
    )
    # Integrand decays on a scale of at most omega_max/LAB_CUTOFF_FACTOR beyond the cut
    edges = np.abs(outer(np.array([-omega_max, omega_max])))
    truncation = 2.0 * float(edges.sum()) * omega_max / LAB_CUTOFF_FACTOR
    return QuadResult(result.value, result.error_estimate + truncation, result.subdivisions_used,
                      result.converged and ledger.converged, result.abs_integral, omega_max,
                      propagated_error=result.propagated_error)


def force_lab(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
              cfg: Optional[QuadratureConfig] = None) -> ForceEstimate:
    """Tangential force in the blackbody rest frame (newtons)."""
    cfg = cfg or DEFAULT_QUADRATURE
    consts = bath.constants
    result = _lab_integral(lambda mu: mu, state, particle, bath, cfg)
    prefactor = consts.hbar * state.gamma / (4.0 * math.pi * consts.c ** 4)
    error = prefactor * result.error_estimate
    if not result.converged:
        logger.warning(f"⚠️ force_lab did not converge at beta={state.beta:g} (error {error:.3e} N)")
    return ForceEstimate(-prefactor * result.value, error, result.converged)


def heating_rate_lab(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                     cfg: Optional[QuadratureConfig] = None) -> ForceEstimate:
    """Net power absorbed by the particle in the blackbody rest frame (watts)."""
    cfg = cfg or DEFAULT_QUADRATURE
    consts = bath.constants
    beta = state.beta
    result = _lab_integral(lambda mu: 1.0 + beta * mu, state, particle, bath, cfg)
    prefactor = consts.hbar * state.gamma / (4.0 * math.pi * consts.c ** 3)
    error = prefactor * result.error_estimate
    if not result.converged:
        logger.warning(f"⚠️ heating_rate_lab did not converge at beta={beta:g} (error {error:.3e} W)")
    return ForceEstimate(prefactor * result.value, error, result.converged)


def _combine_frames(F: ForceEstimate, Q: ForceEstimate, beta: float, c: float) -> ForceEstimate:
    factor = beta / ((1.0 - beta) * (1.0 + beta) * c)
    return ForceEstimate(
        F.value - factor * Q.value,
        F.error + factor * Q.error,
        F.converged and Q.converged,
    )


def force_comoving_from_lab(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                            cfg: Optional[QuadratureConfig] = None) -> ForceEstimate:
    """Co-moving force from the lab quantities: F' = F_x - beta/(1-beta^2) * Q_dot/c."""
    F = force_lab(state, particle, bath, cfg)
    Q = heating_rate_lab(state, particle, bath, cfg)
    return _combine_frames(F, Q, state.beta, bath.constants.c)


def force_nonrel(V: float, Omega: float, theta: float, model: PolarizabilityModel, T2: float,
                 cfg: Optional[QuadratureConfig] = None,
                 constants: PhysicalConstants = CODATA) -> ForceEstimate:
    """First-order-in-velocity co-moving force of a rotating particle (newtons).

    F' = -(hbar^2 V/(30 pi c^5 k_B T2)) * int_0^inf omega^5/sinh^2(hbar omega/2k_B T2)
         * [2(1+sin^2 theta) a''(w) + (3+cos^2 theta)(a''(w+Omega) + a''(w-Omega))] dw
    """
    cfg = cfg or DEFAULT_QUADRATURE
    require_smooth(model)
    if not (math.isfinite(V) and V >= 0):
        raise InvalidParameterError(f"V must be non-negative, got {V!r}")
    if not (math.isfinite(Omega) and Omega >= 0):
        raise InvalidParameterError(f"Omega must be non-negative, got {Omega!r}")
    if V == 0.0:
        return ForceEstimate(0.0, 0.0, True)

    w2 = constants.thermal_frequency(T2)
    direct_weight = 2.0 * (1.0 + math.sin(theta) ** 2)
    shifted_weight = 3.0 + math.cos(theta) ** 2

    def integrand(omega):
        thermal = omega ** 5 * inv_sinh2(omega / (2.0 * w2))
        return thermal * (
            direct_weight * model.alpha_imag(omega)
            + shifted_weight * (model.alpha_imag(omega + Omega) + model.alpha_imag(omega - Omega))
        )

    result = integrate_semi_infinite(integrand, 1.0 / w2, cfg.with_breakpoints(_comoving_peaks(model, Omega)))
    prefactor = constants.hbar * V / (30.0 * math.pi * constants.c ** 5 * w2)
    if not result.converged:
        logger.warning(f"⚠️ force_nonrel did not converge (error {prefactor * result.error_estimate:.3e} N)")
    return ForceEstimate(-prefactor * result.value, prefactor * result.error_estimate, result.converged)


def force_mkrtchian(V: float, model: PolarizabilityModel, T2: float,
                    cfg: Optional[QuadratureConfig] = None,
                    constants: PhysicalConstants = CODATA) -> ForceEstimate:
    """Nonrelativistic friction on a non-rotating particle (newtons).

    F' = -(hbar^2 V/(3 pi c^5 k_B T2)) * int_0^inf omega^5 a''(w)/sinh^2(hbar omega/2k_B T2) dw
    """
    cfg = cfg or DEFAULT_QUADRATURE
    require_smooth(model)
    if not (math.isfinite(V) and V >= 0):
        raise InvalidParameterError(f"V must be non-negative, got {V!r}")
    if V == 0.0:
        return ForceEstimate(0.0, 0.0, True)

    w2 = constants.thermal_frequency(T2)

    def integrand(omega):
        return omega ** 5 * inv_sinh2(omega / (2.0 * w2)) * model.alpha_imag(omega)

    result = integrate_semi_infinite(integrand, 1.0 / w2, cfg.with_breakpoints(model.resonances))
    prefactor = constants.hbar * V / (3.0 * math.pi * constants.c ** 5 * w2)
    return ForceEstimate(-prefactor * result.value, prefactor * result.error_estimate, result.converged)


def force_scale(V: float, model: PolarizabilityModel, constants: PhysicalConstants = CODATA) -> float:
    """Natural force unit hbar*V*alpha0*omega0^5/(3c^5) of a resonant particle."""
    return constants.hbar * V * model.alpha0 * model.omega0 ** 5 / (3.0 * constants.c ** 5)


def normalized_force(force: float, beta: float, model: PolarizabilityModel,
                     constants: PhysicalConstants = CODATA) -> Optional[float]:
    """Force in units of force_scale(beta*c); zero at beta = 0 by convention."""
    if not model.resonances:
        return None
    if beta == 0.0:
        return 0.0
    return force / force_scale(beta * constants.c, model, constants)


def evaluate_forces(state: KinematicState, particle: ParticleSpec, bath: BathSpec,
                    cfg: Optional[QuadratureConfig] = None) -> ForceBreakdown:
    """Evaluate every lab and co-moving quantity at one kinematic state."""
    cfg = cfg or DEFAULT_QUADRATURE
    F = force_lab(state, particle, bath, cfg)
    Q = heating_rate_lab(state, particle, bath, cfg)
    combo = _combine_frames(F, Q, state.beta, bath.constants.c)
    direct = force_comoving(state, particle, bath, cfg)
    return ForceBreakdown(
        F_x=F.value,
        Q_dot=Q.value,
        F_prime_x=direct.value,
        F_prime_from_lab=combo.value,
        F_x_error=F.error,
        Q_dot_error=Q.error,
        F_prime_x_error=direct.error,
        F_prime_from_lab_error=combo.error,
        f_normalized=normalized_force(direct.value, state.beta, particle.model, bath.constants),
        converged=F.converged and Q.converged and direct.converged,
    )
