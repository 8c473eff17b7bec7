"""
Run configuration: strict YAML schema with units in every key name.

Example:

    bath:
      T2_K: 300.0
    particle:
      mass_kg: 1.0e-17
      radius_m: 1.0e-8
      T1_K: 300.0
      model_kind: lorentz
      alpha0_m3: 1.0e-24
      omega0_rad_s: 7.9e13
      gamma_d_rad_s: 7.9e12
    state:
      beta: 0.1

Unknown keys anywhere are rejected. An optional `constants` section replaces
the CODATA set as a whole (reduced-unit runs).
"""

import hashlib
import itertools
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import orjson
import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from .constants import CODATA, PhysicalConstants
from .dynamics import SolverConfig
from .errors import ConfigError
from .physics_core import (
    BathSpec,
    KinematicState,
    ParticleSpec,
    PolarizabilityModel,
    make_delta_model,
    make_lorentz_model,
)
from .quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

SWEEPABLE = ("beta", "omega", "theta", "T1", "T2", "chi", "u")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class ConstantsSection(_Section):
    hbar_J_s: PositiveFloat
    k_B_J_K: PositiveFloat
    c_m_s: PositiveFloat


class BathSection(_Section):
    T2_K: PositiveFloat


class ParticleSection(_Section):
    mass_kg: PositiveFloat
    radius_m: PositiveFloat
    T1_K: PositiveFloat
    model_kind: Literal["lorentz", "delta_resonance"] = "lorentz"
    alpha0_m3: PositiveFloat
    omega0_rad_s: PositiveFloat
    gamma_d_rad_s: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _damping_matches_kind(self):
        if self.model_kind == "lorentz" and self.gamma_d_rad_s is None:
            raise ValueError("gamma_d_rad_s is required for model_kind 'lorentz'")
        if self.model_kind == "delta_resonance" and self.gamma_d_rad_s is not None:
            raise ValueError("gamma_d_rad_s must be omitted for model_kind 'delta_resonance'")
        return self


class StateSection(_Section):
    beta: float = Field(default=0.0, ge=0.0, lt=1.0)
    omega_rad_s: NonNegativeFloat = 0.0
    theta_rad: float = Field(default=0.0, ge=0.0, le=math.pi)


class QuadratureSection(_Section):
    rel_tol: PositiveFloat = 1e-8
    abs_tol: NonNegativeFloat = 0.0
    max_subdivisions: PositiveInt = 2000


class SolverSection(_Section):
    rel_tol: PositiveFloat = 1e-6
    abs_tol: PositiveFloat = 1e-12
    t_start_s: float = 0.0
    t_end_s: float
    initial_step_s: Optional[PositiveFloat] = None
    max_steps: PositiveInt = 100_000
    sample_interval_s: Optional[PositiveFloat] = None
    record_heating: bool = True
    use_interpolant: bool = False
    interpolant_points: int = Field(default=17, ge=3)

    @model_validator(mode="after")
    def _span_increasing(self):
        if not self.t_end_s > self.t_start_s:
            raise ValueError("t_end_s must be greater than t_start_s")
        return self


class OutputSection(_Section):
    path: Optional[str] = None
    precision_digits: Optional[int] = Field(default=None, ge=1, le=17)


class RunConfig(_Section):
    """Validated run configuration plus converters to the domain types."""

    constants: Optional[ConstantsSection] = None
    bath: BathSection
    particle: ParticleSection
    state: StateSection = StateSection()
    quadrature: QuadratureSection = QuadratureSection()
    solver: Optional[SolverSection] = None
    output: OutputSection = OutputSection()

    def physical_constants(self) -> PhysicalConstants:
        if self.constants is None:
            return CODATA
        return PhysicalConstants(hbar=self.constants.hbar_J_s, k_B=self.constants.k_B_J_K, c=self.constants.c_m_s)

    def polarizability_model(self) -> PolarizabilityModel:
        p = self.particle
        if p.model_kind == "delta_resonance":
            return make_delta_model(p.alpha0_m3, p.omega0_rad_s)
        return make_lorentz_model(p.alpha0_m3, p.omega0_rad_s, p.gamma_d_rad_s)

    def bath_spec(self) -> BathSpec:
        return BathSpec(T2=self.bath.T2_K, constants=self.physical_constants())

    def particle_spec(self) -> ParticleSpec:
        p = self.particle
        return ParticleSpec(mass=p.mass_kg, radius=p.radius_m, T1=p.T1_K, model=self.polarizability_model())

    def kinematic_state(self) -> KinematicState:
        s = self.state
        return KinematicState(beta=s.beta, Omega=s.omega_rad_s, theta=s.theta_rad)

    def quadrature_config(self, rel_tol: Optional[float] = None) -> QuadratureConfig:
        q = self.quadrature
        return QuadratureConfig(
            rel_tol=rel_tol if rel_tol is not None else q.rel_tol,
            abs_tol=q.abs_tol,
            max_subdivisions=q.max_subdivisions,
        )

    def solver_config(self) -> SolverConfig:
        if self.solver is None:
            raise ConfigError("the run needs a 'solver' section")
        s = self.solver
        return SolverConfig(
            rel_tol=s.rel_tol,
            abs_tol=s.abs_tol,
            initial_step=s.initial_step_s,
            max_steps=s.max_steps,
            sample_interval=s.sample_interval_s,
            record_heating=s.record_heating,
        )

    def config_hash(self) -> str:
        """Stable short digest of the semantic content."""
        payload = orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)
        return hashlib.sha256(payload).hexdigest()[:16]

    def with_point(self, point: Dict[str, float]) -> "RunConfig":
        """Copy with sweep-axis values applied (see SWEEPABLE)."""
        state = dict(self.state.model_dump())
        particle = dict(self.particle.model_dump())
        bath = dict(self.bath.model_dump())
        consts = self.physical_constants()
        for name, value in point.items():
            if name == "beta":
                state["beta"] = value
            elif name == "omega":
                state["omega_rad_s"] = value
            elif name == "theta":
                state["theta_rad"] = value
            elif name == "T1":
                particle["T1_K"] = value
            elif name == "T2":
                bath["T2_K"] = value
            elif name == "chi":
                bath["T2_K"] = consts.hbar * particle["omega0_rad_s"] / (2.0 * consts.k_B * value)
            elif name == "u":
                state["omega_rad_s"] = value * particle["omega0_rad_s"]
            else:
                raise ConfigError(f"'{name}' is not sweepable; choose from {', '.join(SWEEPABLE)}")
        data = self.model_dump()
        data.update(state=state, particle=particle, bath=bath)
        return _validate(data)


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        location = ".".join(str(part) for part in err["loc"]) or "<root>"
        if err["type"] == "extra_forbidden":
            lines.append(f"unknown key '{location}'")
        elif err["type"] == "missing":
            lines.append(f"missing key '{location}'")
        else:
            lines.append(f"{location}: {err['msg']}")
    return "; ".join(lines)


def _validate(data: Any) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid run config: {_format_validation_error(exc)}") from None


def parse_run_config(text: str) -> RunConfig:
    """Parse YAML text into a RunConfig."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections")
    return _validate(data)


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a YAML run config."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    config = parse_run_config(text)
    logger.info(f"📄 Loaded run config {path} (hash {config.config_hash()})")
    return config


def dump_run_config(config: RunConfig) -> str:
    """Serialize a RunConfig back to YAML."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False)


class SweepAxis(_Section):
    name: Literal["beta", "omega", "theta", "T1", "T2", "chi", "u"]
    min: float
    max: float
    count: int = Field(ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _log_needs_positive(self):
        if self.spacing == "log" and not (self.min > 0 and self.max > 0):
            raise ValueError("log spacing needs positive bounds")
        return self

    def values(self) -> List[float]:
        if self.spacing == "log":
            grid = np.geomspace(self.min, self.max, self.count)
        else:
            grid = np.linspace(self.min, self.max, self.count)
        return [float(v) for v in grid]

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """Parse 'name:min:max:count[:linear|log]'."""
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ConfigError(f"axis '{text}' must look like name:min:max:count[:linear|log]")
        fields = dict(zip(("name", "min", "max", "count", "spacing"), parts))
        try:
            return cls.model_validate(fields)
        except ValidationError as exc:
            raise ConfigError(f"invalid axis '{text}': {_format_validation_error(exc)}") from None


class SweepSpec(_Section):
    axes: Tuple[SweepAxis, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _distinct_axes(self):
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axes: {names}")
        return self

    @property
    def names(self) -> List[str]:
        return [axis.name for axis in self.axes]

    def grid(self) -> List[Dict[str, float]]:
        """Cartesian grid points, last axis varying fastest."""
        return [dict(zip(self.names, combo)) for combo in itertools.product(*(a.values() for a in self.axes))]
