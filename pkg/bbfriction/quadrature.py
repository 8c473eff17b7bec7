"""
Adaptive one-dimensional quadrature.

integrate_finite uses a globally adaptive 21-point Gauss-Kronrod scheme:
the interval with the largest error estimate is bisected until the summed
error meets the tolerance. Integrands are called with numpy arrays of nodes
(any shape) and must return an array of the same shape.

integrate_semi_infinite truncates [lower, inf) at a cut beyond which the
integrand is certified to be exponentially small, and adds the tail bound to
the reported error.
"""

import heapq
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from .errors import IntegrandError, InvalidParameterError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

# Kronrod abscissae on [-1, 1] (positive half, descending); the centre node is 0
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208931961386,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
])
_WGK_CENTRE = 0.149445554002916905664936468389821
# 10-point Gauss weights, paired with _XGK[1::2]
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Semi-infinite truncation
HEAD_EFOLDS = 20.0
EXTENSION_EFOLDS = 10.0
TAIL_SHARE = 0.1
MAX_EXTENSIONS = 60
# Summed per-interval floors may exceed the floor of the sum by a few ulps
ROUNDOFF_SLACK = 2.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and hints for the adaptive integrators.

    Args:
        rel_tol: Relative tolerance on the integral
        abs_tol: Absolute tolerance, in the units of the integral
        max_subdivisions: Maximum number of intervals kept by the adaptive loop
        breakpoints: Interior points where the integrand has structure
    """

    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    max_subdivisions: int = 2000
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.rel_tol >= 0 and self.abs_tol >= 0):
            raise InvalidParameterError("tolerances must be non-negative")
        if not (self.rel_tol > 0 or self.abs_tol > 0):
            raise InvalidParameterError("rel_tol or abs_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise InvalidParameterError(f"max_subdivisions must be >= 1, got {self.max_subdivisions!r}")
        points = tuple(float(p) for p in self.breakpoints)
        if not all(math.isfinite(p) for p in points):
            raise InvalidParameterError("breakpoints must be finite")
        object.__setattr__(self, "breakpoints", points)

    def with_breakpoints(self, points: Iterable[float]) -> "QuadratureConfig":
        return replace(self, breakpoints=tuple(points))


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one adaptive integration.

    abs_integral estimates the integral of |f| and sets the round-off floor
    50*eps*abs_integral below which no error estimate is meaningful. cutoff is
    the upper limit actually used by integrate_semi_infinite.

    converged means the adaptive error, tail bound included, met
    max(rel_tol*|value|, abs_tol, 2*round-off floor). propagated_error is the
    share of error_estimate that comes from a node_error callback (integrand
    values that are themselves estimates); it is reported but not part of
    the convergence test.
    """

    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool
    abs_integral: float = 0.0
    cutoff: Optional[float] = None
    propagated_error: float = 0.0


def roundoff_floor(abs_integral: float) -> float:
    return 50.0 * _EPS * abs_integral


def _tolerance(cfg: QuadratureConfig, value: float, abs_integral: float, share: float = 1.0) -> float:
    return share * max(cfg.rel_tol * abs(value), cfg.abs_tol, ROUNDOFF_SLACK * roundoff_floor(abs_integral))


def _kronrod_nodes(lefts: np.ndarray, rights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes (centre, centre - offsets, centre + offsets) per interval, and the half widths.

    Nodes are placed as centre -/+ offset so that an odd integrand on a
    symmetric interval sums to exactly zero.
    """
    centre = 0.5 * (lefts + rights)
    half = 0.5 * (rights - lefts)
    offsets = half[:, None] * _XGK[None, :]
    nodes = np.concatenate([centre[:, None], centre[:, None] - offsets, centre[:, None] + offsets], axis=1)
    return nodes, half


def _kronrod_abs(g: Callable, lefts: np.ndarray, rights: np.ndarray) -> float:
    """Kronrod estimate of the integral of |g| over the union of the intervals."""
    nodes, half = _kronrod_nodes(lefts, rights)
    values = np.abs(np.asarray(g(nodes), dtype=float))
    per_interval = _WGK_CENTRE * values[:, 0] + (values[:, 1:11] + values[:, 11:]) @ _WGK
    return math.fsum(per_interval * np.abs(half))


def _gk21(f: Callable, lefts: np.ndarray, rights: np.ndarray):
    """Apply the 21-point Gauss-Kronrod pair to each interval in one call."""
    nodes, half = _kronrod_nodes(lefts, rights)

    values = np.asarray(f(nodes), dtype=float)
    if values.shape != nodes.shape:
        try:
            values = np.broadcast_to(values, nodes.shape)
        except ValueError:
            raise IntegrandError(f"integrand returned shape {values.shape}, expected {nodes.shape}") from None
    if not np.all(np.isfinite(values)):
        bad = nodes[~np.isfinite(values)]
        raise IntegrandError(f"integrand is not finite at {bad.ravel()[:3]}")

    fc = values[:, 0]
    fm = values[:, 1:11]
    fp = values[:, 11:]
    pair = fm + fp

    resk = _WGK_CENTRE * fc + pair @ _WGK
    resg = pair[:, 1::2] @ _WG
    resabs = _WGK_CENTRE * np.abs(fc) + (np.abs(fm) + np.abs(fp)) @ _WGK
    mean = 0.5 * resk
    resasc = _WGK_CENTRE * np.abs(fc - mean) + (np.abs(fm - mean[:, None]) + np.abs(fp - mean[:, None])) @ _WGK

    width = np.abs(half)
    value = resk * half
    resabs = resabs * width
    resasc = resasc * width
    err = np.abs((resk - resg) * half)

    scaled = (resasc != 0) & (err != 0)
    safe_resasc = np.where(scaled, resasc, 1.0)
    err = np.where(scaled, resasc * np.minimum(1.0, (200.0 * err / safe_resasc) ** 1.5), err)
    err = np.where(resabs > _TINY / (50.0 * _EPS), np.maximum(roundoff_floor(resabs), err), err)
    return value, err, resabs


def _edges(a: float, b: float, breakpoints: Tuple[float, ...]):
    inner = sorted({p for p in breakpoints if a < p < b})
    return [a] + inner + [b]


def integrate_finite(f: Callable, a: float, b: float, cfg: Optional[QuadratureConfig] = None,
                     node_error: Optional[Callable] = None, share: float = 1.0) -> QuadResult:
    """Integrate f over [a, b].

    Args:
        f: Vectorized integrand, finite on [a, b]
        a: Lower limit
        b: Upper limit, b > a
        cfg: Tolerances and breakpoints (breakpoints outside (a, b) are ignored)
        node_error: Optional absolute error of f at given nodes (for integrands
            that are themselves quadratures); integrated with the Kronrod
            weights of the final partition and added to the error estimate
        share: Fraction of the tolerance this call may spend, in (0, 1]

    Returns:
        QuadResult; converged is False when max_subdivisions is exhausted
    """
    cfg = cfg or DEFAULT_QUADRATURE
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidParameterError(f"need finite a < b, got [{a!r}, {b!r}]")

    edges = _edges(a, b, cfg.breakpoints)
    lefts = np.array(edges[:-1])
    rights = np.array(edges[1:])
    values, errors, resabs = _gk21(f, lefts, rights)

    intervals = {}
    heap = []
    for key in range(len(lefts)):
        intervals[key] = (float(values[key]), float(errors[key]), float(resabs[key]),
                          float(lefts[key]), float(rights[key]))
        heapq.heappush(heap, (-float(errors[key]), key, float(lefts[key]), float(rights[key])))
    next_key = len(lefts)

    total = math.fsum(values)
    err_total = math.fsum(errors)
    abs_total = math.fsum(resabs)
    converged = False

    while True:
        tolerance = _tolerance(cfg, total, abs_total, share)
        if err_total <= tolerance:
            converged = True
            break
        if len(intervals) >= cfg.max_subdivisions or not heap:
            break

        _, key, lo, hi = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # Too narrow to split; its contribution stays as is
            continue

        v, e, r = _gk21(f, np.array([lo, mid]), np.array([mid, hi]))
        old_value, old_err, old_abs, _, _ = intervals.pop(key)
        total += v[0] + v[1] - old_value
        err_total += e[0] + e[1] - old_err
        abs_total += r[0] + r[1] - old_abs
        for k, (left, right) in enumerate(((lo, mid), (mid, hi))):
            intervals[next_key] = (float(v[k]), float(e[k]), float(r[k]), left, right)
            heapq.heappush(heap, (-float(e[k]), next_key, left, right))
            next_key += 1

    parts = list(intervals.values())
    value = math.fsum(p[0] for p in parts)
    error = math.fsum(p[1] for p in parts)
    abs_integral = math.fsum(p[2] for p in parts)
    if not converged:
        logger.debug(f"integrate_finite on [{a:g}, {b:g}] stopped at {len(parts)} intervals, error {error:.3e}")
    propagated = 0.0
    if node_error is not None:
        propagated = _kronrod_abs(node_error, np.array([p[3] for p in parts]), np.array([p[4] for p in parts]))
    return QuadResult(
        value=value,
        error_estimate=error + propagated,
        subdivisions_used=len(parts),
        converged=converged,
        abs_integral=abs_integral,
        propagated_error=propagated,
    )


def _tail_bound(f: Callable, cut: float, decay_rate: float) -> float:
    """Bound the integral of |f| over [cut, inf).

    Assumes |f(s)| <= M*exp(-decay_rate*s) up to polynomial factors. The
    envelope constant is sampled with half the decay rate, which absorbs the
    polynomial prefactor, and the bound is 2*M/decay_rate.
    """
    samples = cut + np.arange(12) * (2.0 / decay_rate)
    samples = np.concatenate([samples, [2.0 * cut, 4.0 * cut]]) if cut > 0 else samples
    magnitude = np.abs(np.asarray(f(samples), dtype=float))
    if not np.all(np.isfinite(magnitude)):
        raise IntegrandError(f"integrand is not finite in the tail beyond {cut:g}")
    growth = np.exp(np.minimum(0.5 * decay_rate * (samples - cut), 700.0))
    envelope = np.where(magnitude > 0, magnitude * growth, 0.0)
    return float(2.0 * envelope.max() / decay_rate)


def integrate_semi_infinite(
    f: Callable,
    decay_rate: float,
    cfg: Optional[QuadratureConfig] = None,
    lower: float = 0.0,
    node_error: Optional[Callable] = None,
) -> QuadResult:
    """Integrate an exponentially damped f over [lower, inf).

    Args:
        f: Vectorized integrand decaying at least like exp(-decay_rate*x)
           beyond its last breakpoint
        decay_rate: Decay rate in units of 1/x, strictly positive
        cfg: Tolerances and breakpoints
        lower: Lower limit
        node_error: Passed on to integrate_finite for every segment

    Returns:
        QuadResult whose error includes the certified tail bound and whose
        cutoff records the truncation point
    """
    cfg = cfg or DEFAULT_QUADRATURE
    if not (math.isfinite(decay_rate) and decay_rate > 0):
        raise InvalidParameterError(f"decay_rate must be positive, got {decay_rate!r}")

    structure = max((p for p in cfg.breakpoints if p > lower), default=lower)
    cut = structure + HEAD_EFOLDS / decay_rate
    # Segments leave TAIL_SHARE of the target to the tail bound
    share = 1.0 - TAIL_SHARE
    parts = [integrate_finite(f, lower, cut, cfg, node_error, share)]
    value = parts[0].value
    abs_integral = parts[0].abs_integral
    tail_cfg = cfg.with_breakpoints(())

    extensions = 0
    tail_ok = False
    while True:
        bound = _tail_bound(f, cut, decay_rate)
        tolerance = _tolerance(cfg, value, abs_integral)
        if bound <= TAIL_SHARE * tolerance:
            tail_ok = True
            break
        if extensions >= MAX_EXTENSIONS:
            logger.debug(f"tail bound {bound:.3e} still above tolerance at cut {cut:g}")
            break
        upper = cut + EXTENSION_EFOLDS / decay_rate
        segment = integrate_finite(f, cut, upper, tail_cfg, node_error, share)
        parts.append(segment)
        value = math.fsum(p.value for p in parts)
        abs_integral = math.fsum(p.abs_integral for p in parts)
        cut = upper
        extensions += 1

    propagated = math.fsum(p.propagated_error for p in parts)
    adaptive = math.fsum(p.error_estimate - p.propagated_error for p in parts) + bound
    converged = (tail_ok and all(p.converged for p in parts)
                 and adaptive <= _tolerance(cfg, value, abs_integral))
    return QuadResult(
        value=value,
        error_estimate=adaptive + propagated,
        subdivisions_used=sum(p.subdivisions_used for p in parts),
        converged=converged,
        abs_integral=abs_integral,
        cutoff=cut,
        propagated_error=propagated,
    )
