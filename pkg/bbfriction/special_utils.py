"""
Numerically stable thermal kernels.

All helpers accept scalars or numpy arrays and return the same kind. Each
switches to a Taylor branch when its argument is below SERIES_SWITCH so that
removable singularities never produce 0*inf.
"""

import numpy as np

SERIES_SWITCH = 1e-4


def _like(template, values):
    if np.ndim(template) == 0:
        return float(values)
    return values


def xcoth(y):
    """y*coth(y); even, equal to 1 at the origin."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = y / np.tanh(y)
    out = np.where(np.abs(y) < SERIES_SWITCH, 1.0 + y * y / 3.0, direct)
    return _like(y, out)


def xcoth_tail(y):
    """y*(coth(y) - sign(y)) = 2|y|/(exp(2|y|) - 1).

    This is the thermal part of y*coth(y) once the vacuum term |y| is taken
    out. It is even, equals 1 at the origin and decays like 2|y|exp(-2|y|),
    so differences of two such terms never lose digits to cancellation.
    """
    a = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = 2.0 * a / np.expm1(2.0 * a)
    out = np.where(a < SERIES_SWITCH, 1.0 - a + a * a / 3.0, direct)
    return _like(a, out)


def bose(y):
    """Bose occupation 1/(exp(y) - 1) for y > 0."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.exp(-y) / -np.expm1(-y)
    return _like(y, out)


def inv_sinh2(y):
    """1/sinh(y)**2 without overflow for large |y|."""
    a = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore", over="ignore"):
        denom = -np.expm1(-2.0 * a)
        out = 4.0 * np.exp(-2.0 * a) / (denom * denom)
    return _like(a, out)


def coth(y):
    """Plain hyperbolic cotangent (diagnostic paths only)."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        out = 1.0 / np.tanh(y)
    return _like(y, out)
