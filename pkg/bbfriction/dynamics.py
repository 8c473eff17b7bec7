"""
Translational deceleration of a particle in blackbody radiation.

The velocity obeys dbeta/dt = (1 - beta^2)^(3/2) * F'(beta) / (m c), with the
co-moving force F' from bbfriction.radiation_forces. Rotation rate, tilt and
both temperatures are held fixed along a trajectory; the lab-frame heating
rate is recorded as a diagnostic.

Integration uses the Dormand-Prince 5(4) embedded pair with local
extrapolation and first-same-as-last reuse of the final stage.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    IntegrandError,
    InvalidParameterError,
    RhsEvaluationError,
    StepLimitError,
    StepSizeUnderflowError,
)
from .physics_core import BathSpec, KinematicState, ParticleSpec
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig
from .radiation_forces import force_comoving, heating_rate_lab
from .resonance import linear_drag_coefficient

logger = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau
BT = {
    1: [1 / 5],
    2: [3 / 40, 9 / 40],
    3: [44 / 45, -56 / 15, 32 / 9],
    4: [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    5: [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    6: [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
}
# 5th order weights equal the last tableau row (FSAL)
B5 = BT[6] + [0.0]
# Difference between 5th and 4th order weights
TR = [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]

SAFETY = 0.9
MAX_GROWTH = 5.0
MIN_SHRINK = 0.2


@dataclass(frozen=True)
class SolverConfig:
    """Step control for evolve().

    Args:
        rel_tol: Relative tolerance on beta per step
        abs_tol: Absolute tolerance on beta per step
        initial_step: First trial step in seconds (None picks one from the span)
        max_steps: Accepted-plus-rejected step budget
        sample_interval: Output spacing in seconds (None records every accepted step)
        record_heating: Evaluate the lab heating rate at each sample
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    initial_step: Optional[float] = None
    max_steps: int = 100_000
    sample_interval: Optional[float] = None
    record_heating: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParameterError("solver tolerances must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise InvalidParameterError(f"initial_step must be positive, got {self.initial_step!r}")
        if self.sample_interval is not None and not self.sample_interval > 0:
            raise InvalidParameterError(f"sample_interval must be positive, got {self.sample_interval!r}")
        if int(self.max_steps) < 1:
            raise InvalidParameterError(f"max_steps must be >= 1, got {self.max_steps!r}")


class TrajectorySample(NamedTuple):
    t: float
    beta: float
    F_prime_x: float
    Q_dot: Optional[float]


@dataclass
class Trajectory:
    """Samples of beta(t) plus solver statistics.

    error_estimate is the sum of the accepted local error estimates, a
    bound-like proxy for the global error in beta.
    """

    samples: List[TrajectorySample] = field(default_factory=list)
    steps: int = 0
    rejected_steps: int = 0
    error_estimate: float = 0.0
    completed: bool = False

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def betas(self) -> np.ndarray:
        return np.array([s.beta for s in self.samples])


class ForceInterpolant:
    """Memoized F'(beta) on a fixed beta-grid, interpolated with PCHIP.

    PCHIP keeps the sign of the tabulated force between nodes, so the
    interpolated equation of motion decelerates wherever the force does.
    error_budget is the largest relative deviation from direct evaluation
    found at interval midpoints when the table is built.
    """

    def __init__(self, betas: np.ndarray, forces: np.ndarray, error_budget: float = 0.0):
        self.betas = np.asarray(betas, dtype=float)
        self.forces = np.asarray(forces, dtype=float)
        self.error_budget = error_budget
        self._spline = PchipInterpolator(self.betas, self.forces, extrapolate=False)

    @classmethod
    def build(
        cls,
        particle: ParticleSpec,
        bath: BathSpec,
        Omega: float,
        theta: float,
        beta_max: float,
        points: int = 17,
        cfg: Optional[QuadratureConfig] = None,
        check_points: int = 2,
    ) -> "ForceInterpolant":
        """Tabulate the co-moving force on a uniform grid over [0, beta_max]."""
        if not (0.0 < beta_max < 1.0):
            raise InvalidParameterError(f"beta_max must lie in (0, 1), got {beta_max!r}")
        if points < 3:
            raise InvalidParameterError(f"need at least 3 grid points, got {points}")
        cfg = cfg or DEFAULT_QUADRATURE
        betas = np.linspace(0.0, beta_max, points)
        forces = np.array([
            _direct_force(b, particle, bath, Omega, theta, cfg) for b in betas
        ])
        table = cls(betas, forces)

        budget = 0.0
        midpoints = 0.5 * (betas[:-1] + betas[1:])
        for beta in midpoints[np.linspace(0, len(midpoints) - 1, check_points).astype(int)]:
            exact = _direct_force(beta, particle, bath, Omega, theta, cfg)
            if exact != 0.0:
                budget = max(budget, abs(table(beta) / exact - 1.0))
        table.error_budget = budget
        logger.info(f"📈 Force table: {points} points on [0, {beta_max:g}], interpolation error {budget:.2e}")
        return table

    def __call__(self, beta: float) -> float:
        value = float(self._spline(beta))
        if math.isnan(value):
            raise RhsEvaluationError(f"beta={beta!r} outside the tabulated range [0, {self.betas[-1]:g}]")
        return value


def _direct_force(beta: float, particle: ParticleSpec, bath: BathSpec, Omega: float, theta: float,
                  cfg: QuadratureConfig) -> float:
    estimate = force_comoving(KinematicState(beta=float(beta), Omega=Omega, theta=theta), particle, bath, cfg)
    if not estimate.converged:
        raise RhsEvaluationError(f"co-moving force did not converge at beta={beta!r}")
    return estimate.value


def _acceleration(beta: float, force: float, particle: ParticleSpec, c: float) -> float:
    return ((1.0 - beta) * (1.0 + beta)) ** 1.5 * force / (particle.mass * c)


def deceleration_rhs(beta: float, particle: ParticleSpec, bath: BathSpec, Omega: float, theta: float,
                     cfg: Optional[QuadratureConfig] = None) -> float:
    """dbeta/dt in 1/s at velocity beta.

    Raises:
        InvalidParameterError: beta outside [0, 1)
        RhsEvaluationError: the force quadrature did not converge
    """
    if not (math.isfinite(beta) and 0.0 <= beta < 1.0):
        raise InvalidParameterError(f"beta must lie in [0, 1), got {beta!r}")
    force = _direct_force(beta, particle, bath, Omega, theta, cfg or DEFAULT_QUADRATURE)
    return _acceleration(beta, force, particle, bath.constants.c)


def linear_drag_time(particle: ParticleSpec, bath: BathSpec) -> float:
    """Slow-motion decay time m/kappa of a non-rotating resonant particle."""
    return particle.mass / linear_drag_coefficient(particle.model, bath)


def _force_source(state0: KinematicState, particle: ParticleSpec, bath: BathSpec,
                  quad_cfg: QuadratureConfig, interpolant: Optional[ForceInterpolant]) -> Callable[[float], float]:
    if interpolant is not None:
        return interpolant
    return lambda beta: _direct_force(beta, particle, bath, state0.Omega, state0.theta, quad_cfg)


def evolve(
    state0: KinematicState,
    particle: ParticleSpec,
    bath: BathSpec,
    t_span: Tuple[float, float],
    solver_cfg: Optional[SolverConfig] = None,
    quad_cfg: Optional[QuadratureConfig] = None,
    interpolant: Optional[ForceInterpolant] = None,
) -> Trajectory:
    """Integrate beta(t) from state0 over t_span.

    Args:
        state0: Initial velocity, rotation rate and tilt (the latter two are held fixed)
        particle: Particle mass, size, temperature and polarizability
        bath: Background temperature and constants
        t_span: (t_start, t_end) in seconds
        solver_cfg: Step control
        quad_cfg: Quadrature settings for the force
        interpolant: Optional tabulated force replacing direct evaluation

    Returns:
        Trajectory with samples at t_start, every sample_interval and t_end

    Raises:
        StepSizeUnderflowError, StepLimitError: with the partial trajectory attached
        RhsEvaluationError: from a failed force or recorded heating-rate evaluation
    """
    solver_cfg = solver_cfg or SolverConfig()
    quad_cfg = quad_cfg or DEFAULT_QUADRATURE
    t_start, t_end = (float(t) for t in t_span)
    if not (math.isfinite(t_start) and math.isfinite(t_end) and t_end > t_start):
        raise InvalidParameterError(f"t_span must be finite and increasing, got {t_span!r}")

    c = bath.constants.c
    force_at = _force_source(state0, particle, bath, quad_cfg, interpolant)
    trajectory = Trajectory()

    def rhs(beta: float) -> Tuple[float, float]:
        force = force_at(beta)
        return _acceleration(beta, force, particle, c), force

    def record(t: float, beta: float, force: float) -> None:
        q_dot = None
        if solver_cfg.record_heating:
            heating = heating_rate_lab(state0.with_beta(beta), particle, bath, quad_cfg)
            if not heating.converged:
                raise RhsEvaluationError(f"heating rate did not converge at beta={beta!r}")
            q_dot = heating.value
        trajectory.samples.append(TrajectorySample(t, beta, force, q_dot))

    interval = solver_cfg.sample_interval
    sample_index = 1
    h = solver_cfg.initial_step or (t_end - t_start) / 100.0
    if interval:
        h = min(h, interval)
    resolution = 16.0 * np.finfo(float).eps * max(abs(t_start), abs(t_end))

    t = t_start
    beta = state0.beta
    attempts = 0
    try:
        k_first, force = rhs(beta)
        record(t, beta, force)

        while t < t_end:
            if attempts >= solver_cfg.max_steps:
                raise StepLimitError(f"step budget {solver_cfg.max_steps} exhausted at t={t:g} s", trajectory)
            attempts += 1
            if h <= resolution:
                raise StepSizeUnderflowError(f"step size underflow at t={t:g} s, beta={beta!r}", trajectory)

            target = t_end
            at_sample = False
            if interval:
                next_sample = t_start + sample_index * interval
                if t_end - next_sample > resolution:
                    target = next_sample
                    at_sample = True
            lands = h >= target - t
            step = target - t if lands else h

            k = [k_first]
            forces = [force]
            stage_ok = True
            for row in range(1, 7):
                y_stage = beta + step * sum(a * kk for a, kk in zip(BT[row], k))
                if not (0.0 <= y_stage < 1.0):
                    stage_ok = False
                    break
                slope, stage_force = rhs(y_stage)
                k.append(slope)
                forces.append(stage_force)

            if not stage_ok:
                trajectory.rejected_steps += 1
                h = 0.5 * step
                continue

            # The last stage already sits on the 5th order solution
            beta_new = beta + step * sum(b * kk for b, kk in zip(B5, k))
            error = abs(step * sum(e * kk for e, kk in zip(TR, k)))
            scale = solver_cfg.abs_tol + solver_cfg.rel_tol * max(abs(beta), abs(beta_new))
            ratio = error / scale

            if ratio <= 1.0:
                t = target if lands else t + step
                beta = beta_new
                k_first, force = k[6], forces[6]
                trajectory.steps += 1
                trajectory.error_estimate += error
                if interval is None or lands:
                    record(t, beta, force)
                if lands and at_sample:
                    sample_index += 1
                growth = MAX_GROWTH if ratio == 0.0 else min(MAX_GROWTH, SAFETY * ratio ** -0.2)
                proposal = step * growth
                h = max(h, proposal) if lands else proposal
            else:
                trajectory.rejected_steps += 1
                h = step * max(MIN_SHRINK, SAFETY * ratio ** -0.2)
    except RhsEvaluationError as exc:
        exc.trajectory = trajectory
        raise
    except IntegrandError as exc:
        failure = RhsEvaluationError(f"force integrand failed at beta={beta!r}: {exc}")
        failure.trajectory = trajectory
        raise failure from exc

    trajectory.completed = True
    logger.info(
        f"✅ Trajectory done: {trajectory.steps} steps, {trajectory.rejected_steps} rejected, "
        f"beta {state0.beta:g} -> {beta:g}"
    )
    return trajectory
