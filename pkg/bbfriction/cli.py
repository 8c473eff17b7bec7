"""
Command-line front end.

Subcommands write CSV to stdout or --out. Exit codes: 0 ok, 2 config error,
3 numerical non-convergence, 4 solver abort.
"""

import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Tuple

import click
from tqdm import tqdm

from . import __version__
from .config import RunConfig, SweepAxis, SweepSpec, load_run_config
from .csv_output import CsvReport
from .dynamics import ForceInterpolant, evolve, linear_drag_time
from .errors import (
    ConfigError,
    FrictionError,
    IntegrandError,
    InvalidParameterError,
    RhsEvaluationError,
    SolverAbortError,
    UnsupportedEvaluationError,
)
from .physics_core import ModelKind, validate_dipole_conditions
from .radiation_forces import (
    evaluate_forces,
    force_comoving,
    force_lab,
    heating_rate_lab,
    normalized_force,
)
from .resonance import (
    DEFAULT_FIG2_CHI,
    FIG2_U_MAX,
    acceleration_threshold,
    acceleration_window,
    fig2_curves,
    resonance_force_nonrel,
)
from .settings import configure_logging, get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SOLVER = 4

FORCE_COLUMNS = ["beta", "omega", "theta", "T1", "T2", "F_x", "Q_dot",
                 "F_prime_lab_combo", "F_prime_direct", "err_est"]
TRAJECTORY_COLUMNS = ["t", "beta", "F_prime_x", "Q_dot"]
SWEEP_QUANTITIES = ("F_prime", "F_x", "Q_dot", "f_normalized")


def common_options(command):
    """Options shared by every subcommand."""

    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="YAML run configuration.")
    @click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), default=None,
                  help="CSV destination (default: standard output).")
    @click.option("--quad-rtol", type=click.FloatRange(min=0.0, min_open=True), default=None,
                  help="Override the quadrature relative tolerance.")
    @click.option("--seed", type=int, default=None,
                  help="Reserved; every computation is deterministic.")
    @click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
                  default=None, help="Logging level on stderr.")
    @functools.wraps(command)
    def wrapper(*args, config_path, out_path, quad_rtol, seed, log_level, **kwargs):
        configure_logging(log_level)
        if seed is not None:
            logger.debug(f"--seed {seed} ignored: computations are deterministic")
        options = {"config_path": config_path, "out_path": out_path, "quad_rtol": quad_rtol}
        try:
            return command(*args, options=options, **kwargs)
        except (ConfigError, InvalidParameterError, UnsupportedEvaluationError) as exc:
            click.echo(f"❌ {exc}", err=True)
            click.get_current_context().exit(EXIT_CONFIG)
        except IntegrandError as exc:
            click.echo(f"❌ {exc}", err=True)
            click.get_current_context().exit(EXIT_NUMERICAL)

    return wrapper


def _require_config(options: Dict) -> RunConfig:
    if not options["config_path"]:
        raise ConfigError("this command needs --config")
    return load_run_config(options["config_path"])


def _rel_tol(options: Dict) -> Optional[float]:
    if options["quad_rtol"] is not None:
        return options["quad_rtol"]
    return get_settings().quad_rel_tol


@contextmanager
def _report(options: Dict, config: Optional[RunConfig] = None) -> Iterator[CsvReport]:
    path = options["out_path"]
    precision = None
    if config is not None:
        path = path or config.output.path
        precision = config.output.precision_digits
    with click.open_file(path or "-", "w", encoding="utf-8") as stream:
        yield CsvReport(stream, precision)


def _finish(code: int) -> None:
    if code != EXIT_OK:
        click.get_current_context().exit(code)


@click.group()
@click.version_option(__version__, prog_name="bbfriction")
def cli():
    """Blackbody friction on moving, rotating polarizable particles."""


@cli.command()
@common_options
def force(options):
    """Lab-frame force, heating rate and both co-moving force estimates at one state."""
    config = _require_config(options)
    particle = config.particle_spec()
    if particle.model.kind is not ModelKind.SMOOTH:
        raise ConfigError("force needs model_kind 'lorentz'; delta resonances are handled by threshold/fig2")
    bath = config.bath_spec()
    state = config.kinematic_state()
    warnings = validate_dipole_conditions(particle, bath, state)

    logger.info(f"🔄 Evaluating forces at beta={state.beta:g}, Omega={state.Omega:g} rad/s, theta={state.theta:g}")
    breakdown = evaluate_forces(state, particle, bath, config.quadrature_config(_rel_tol(options)))

    with _report(options, config) as report:
        report.provenance("force", config.config_hash(), warnings)
        if not breakdown.converged:
            report.comment("warning: quadrature did not converge; values are partial")
        report.header(FORCE_COLUMNS)
        report.row([
            state.beta, state.Omega, state.theta, particle.T1, bath.T2,
            breakdown.F_x, breakdown.Q_dot, breakdown.F_prime_from_lab, breakdown.F_prime_x,
            breakdown.F_prime_x_error + breakdown.F_prime_from_lab_error,
        ])
    _finish(EXIT_OK if breakdown.converged else EXIT_NUMERICAL)


@cli.command()
@click.option("--chi", "chi_values", type=click.FloatRange(min=0.0, min_open=True), multiple=True, required=True,
              help="Reduced inverse temperature hbar*omega0/(2 k_B T2); repeatable.")
@click.option("--theta", type=click.FloatRange(min=0.0, max=math.pi), default=0.0, show_default=True,
              help="Rotation-axis tilt in radians.")
@common_options
def threshold(chi_values, theta, options):
    """Rotation ratio at which friction turns into acceleration."""
    chi_lo, chi_hi = acceleration_window()
    with _report(options) as report:
        report.provenance("threshold")
        report.comment(f"acceleration_window: chi_lo={chi_lo!r}, chi_hi={chi_hi!r}")
        report.header(["chi", "theta", "u_star"])
        for chi in chi_values:
            report.row([chi, theta, acceleration_threshold(chi, theta)])


@cli.command()
@click.option("--u-max", type=click.FloatRange(min=0.0, max=FIG2_U_MAX), default=FIG2_U_MAX, show_default=True)
@click.option("--n-points", type=click.IntRange(min=2), default=151, show_default=True)
@click.option("--chi", "chi_values", type=click.FloatRange(min=0.0, min_open=True), multiple=True,
              default=DEFAULT_FIG2_CHI, show_default=True)
@common_options
def fig2(u_max, n_points, chi_values, options):
    """Normalized force versus rotation ratio for several temperatures (theta = 0)."""
    u_grid = [u_max * i / (n_points - 1) for i in range(n_points)]
    with _report(options) as report:
        report.provenance("fig2")
        report.header(["chi", "u", "f_quadratic", "f_exact"])
        for row in fig2_curves(u_grid, chi_values, theta=0.0):
            report.row(list(row))


def evaluate_quantity(config: RunConfig, quantity: str, rel_tol: Optional[float]) -> Tuple[float, float, bool]:
    """Evaluate one sweep quantity for a fully specified config.

    Returns:
        (value, error, converged)
    """
    particle = config.particle_spec()
    bath = config.bath_spec()
    state = config.kinematic_state()
    consts = bath.constants
    model = particle.model

    if model.kind is ModelKind.DELTA_RESONANCE:
        if quantity not in ("F_prime", "f_normalized"):
            raise ConfigError(f"{quantity} needs a smooth model")
        value = resonance_force_nonrel(state.beta * consts.c, state.Omega, state.theta, model, bath.T2, consts)
        if quantity == "f_normalized":
            value = normalized_force(value, state.beta, model, consts)
        return value, 0.0, True

    cfg = config.quadrature_config(rel_tol)
    if quantity == "F_x":
        return tuple(force_lab(state, particle, bath, cfg))
    if quantity == "Q_dot":
        return tuple(heating_rate_lab(state, particle, bath, cfg))
    estimate = force_comoving(state, particle, bath, cfg)
    if quantity == "F_prime":
        return tuple(estimate)
    value = normalized_force(estimate.value, state.beta, model, consts)
    error = normalized_force(estimate.error, state.beta, model, consts)
    return value, error, estimate.converged


def _sweep_point(job) -> Tuple[Optional[float], Optional[float], bool]:
    config, point, quantity, rel_tol = job
    try:
        value, error, converged = evaluate_quantity(config.with_point(point), quantity, rel_tol)
    except FrictionError as exc:
        logger.error(f"❌ Sweep point {point} failed: {exc}")
        return None, None, True
    return value, error, not converged


@cli.command()
@click.option("--axis", "axes", multiple=True, required=True,
              help="name:min:max:count[:linear|log] with name in beta, omega, theta, T1, T2, chi, u; repeatable.")
@click.option("--quantity", type=click.Choice(SWEEP_QUANTITIES), default="F_prime", show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes (default from settings).")
@click.option("--progress/--no-progress", default=None, help="Show a progress bar on stderr.")
@common_options
def sweep(axes, quantity, workers, progress, options):
    """Evaluate one quantity over a Cartesian parameter grid."""
    config = _require_config(options)
    try:
        spec = SweepSpec(axes=tuple(SweepAxis.parse(text) for text in axes))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    settings = get_settings()
    workers = workers or settings.sweep_workers
    show = settings.show_progress if progress is None else progress
    rel_tol = _rel_tol(options)
    points = spec.grid()
    jobs = [(config, point, quantity, rel_tol) for point in points]
    logger.info(f"🚀 Sweeping {quantity} over {len(points)} points with {workers} worker(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(_sweep_point, jobs), total=len(jobs), disable=not show))
    else:
        results = [_sweep_point(job) for job in tqdm(jobs, disable=not show)]

    failures = 0
    with _report(options, config) as report:
        report.provenance("sweep", config.config_hash())
        report.header(spec.names + [quantity, "err_est", "failed"])
        for point, (value, error, failed) in zip(points, results):
            failures += failed
            report.row([point[name] for name in spec.names] + [value, error, failed])
        if failures:
            report.comment(f"warning: {failures} of {len(points)} points failed")
    _finish(EXIT_NUMERICAL if failures else EXIT_OK)


@cli.command("evolve")
@common_options
def evolve_command(options):
    """Integrate the velocity history beta(t)."""
    config = _require_config(options)
    solver_cfg = config.solver_config()
    particle = config.particle_spec()
    if particle.model.kind is not ModelKind.SMOOTH:
        raise ConfigError("evolve needs model_kind 'lorentz'")
    bath = config.bath_spec()
    state = config.kinematic_state()
    quad_cfg = config.quadrature_config(_rel_tol(options))
    warnings = validate_dipole_conditions(particle, bath, state)

    notes: List[str] = []
    if state.Omega == 0.0:
        notes.append(f"slow-motion decay time {linear_drag_time(particle, bath)!r} s")

    code = EXIT_OK
    abort_message = None
    trajectory = None
    try:
        interpolant = None
        if config.solver.use_interpolant and state.beta > 0:
            # headroom above beta0 for rotation-driven acceleration
            beta_max = min(0.5 * (1.0 + state.beta), 1.25 * state.beta)
            interpolant = ForceInterpolant.build(particle, bath, state.Omega, state.theta, beta_max,
                                                 points=config.solver.interpolant_points, cfg=quad_cfg)
            notes.append(f"force table on [0, {beta_max!r}], interpolation error {interpolant.error_budget:.3e}")
        trajectory = evolve(state, particle, bath, (config.solver.t_start_s, config.solver.t_end_s),
                            solver_cfg, quad_cfg, interpolant)
    except (SolverAbortError, RhsEvaluationError) as exc:
        logger.error(f"❌ Integration aborted: {exc}")
        trajectory = getattr(exc, "trajectory", None)
        abort_message = str(exc)
        code = EXIT_SOLVER

    with _report(options, config) as report:
        report.provenance("evolve", config.config_hash(), warnings)
        for note in notes:
            report.comment(note)
        if abort_message:
            report.comment(f"warning: partial trajectory, solver aborted: {abort_message}")
        report.header(TRAJECTORY_COLUMNS)
        for sample in (trajectory.samples if trajectory else []):
            report.row(list(sample))
    _finish(code)


def main():
    """Entry point used by friction_cli.py."""
    cli()
