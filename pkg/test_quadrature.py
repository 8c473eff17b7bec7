#!/usr/bin/env python3
"""
Tests for the adaptive Gauss-Kronrod integrators
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the current directory to the path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from bbfriction.errors import IntegrandError, InvalidParameterError
from bbfriction.quadrature import (
    ROUNDOFF_SLACK,
    QuadratureConfig,
    integrate_finite,
    integrate_semi_infinite,
    roundoff_floor,
)
from bbfriction.special_utils import inv_sinh2

# 7.5 * zeta(5)
SINH2_FIFTH_MOMENT = 7.776958163


class TestIntegrateFinite:
    def test_smooth_integrand(self):
        result = integrate_finite(np.sin, 0.0, math.pi)
        assert result.converged
        assert result.value == pytest.approx(2.0, rel=1e-13)
        assert result.error_estimate <= 1e-8 * 2.0

    def test_odd_integrand_on_symmetric_interval_is_exactly_zero(self):
        result = integrate_finite(lambda x: x ** 3 * np.exp(-x * x), -2.0, 2.0)
        assert result.value == 0.0
        assert result.converged

    def test_breakpoint_at_kink(self):
        cfg = QuadratureConfig(rel_tol=1e-12, breakpoints=(0.3,))
        result = integrate_finite(lambda x: np.abs(x - 0.3), 0.0, 1.0, cfg)
        assert result.value == pytest.approx(0.29, rel=1e-13)
        assert result.subdivisions_used == 2

    def test_peaked_integrand_is_refined(self):
        width = 1e-3
        result = integrate_finite(lambda x: width / ((x - 0.37) ** 2 + width ** 2), 0.0, 1.0)
        exact = math.atan(0.63 / width) + math.atan(0.37 / width)
        assert result.converged
        assert result.value == pytest.approx(exact, rel=1e-8)
        assert result.subdivisions_used > 1

    def test_error_estimate_covers_true_error(self):
        cfg = QuadratureConfig(rel_tol=1e-6)
        result = integrate_finite(lambda x: np.exp(-x) * np.cos(x), 0.0, 30.0, cfg)
        exact = 0.5 * (1.0 - math.exp(-30.0) * (math.cos(30.0) - math.sin(30.0)))
        assert abs(result.value - exact) <= result.error_estimate

    def test_linearity(self):
        f = lambda x: np.exp(-x) * np.sin(3.0 * x)
        g = lambda x: 1.0 / (1.0 + x * x)
        combined = integrate_finite(lambda x: 2.0 * f(x) - 3.0 * g(x), 0.0, 2.0)
        parts = 2.0 * integrate_finite(f, 0.0, 2.0).value - 3.0 * integrate_finite(g, 0.0, 2.0).value
        assert combined.value == pytest.approx(parts, rel=1e-12)

    def test_error_estimate_is_honest_over_many_integrands(self):
        cfg = QuadratureConfig(rel_tol=1e-6)
        cases = []
        for c in np.linspace(-19.6, 19.6, 25):
            cases.append((lambda x, c=c: np.exp(c * x), 0.0, 1.0, math.expm1(c) / c))
        for k in np.linspace(0.5, 24.5, 25):
            exact = (1.0 + math.exp(-10.0) * (k * math.sin(10.0 * k) - math.cos(10.0 * k))) / (1.0 + k * k)
            cases.append((lambda x, k=k: np.exp(-x) * np.cos(k * x), 0.0, 10.0, exact))
        assert len(cases) == 50
        for f, a, b, exact in cases:
            result = integrate_finite(f, a, b, cfg)
            assert result.converged
            assert abs(result.value - exact) <= result.error_estimate, (a, b, exact)

    def test_breakpoints_do_not_change_the_value(self):
        f = lambda x: np.exp(-x) * np.sin(5.0 * x)
        reference = integrate_finite(f, 0.0, 3.0, QuadratureConfig(rel_tol=1e-12)).value
        for points in ((1.0,), (0.3, 1.7, 2.2), (-1.0, 0.5, 4.0)):
            value = integrate_finite(f, 0.0, 3.0, QuadratureConfig(rel_tol=1e-12, breakpoints=points)).value
            assert value == pytest.approx(reference, rel=1e-11), points

    def test_inverse_square_root_endpoint(self):
        cfg = QuadratureConfig(breakpoints=(1e-6,))
        result = integrate_finite(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, cfg)
        assert result.converged
        assert result.value == pytest.approx(2.0, rel=1e-7)

    def test_node_error_is_integrated(self):
        plain = integrate_finite(np.cos, 0.0, 2.0)
        noisy = integrate_finite(np.cos, 0.0, 2.0, node_error=lambda x: np.full(np.shape(x), 1e-9))
        assert noisy.value == plain.value
        assert noisy.error_estimate == pytest.approx(plain.error_estimate + 2e-9, rel=1e-9)
        assert noisy.propagated_error == pytest.approx(2e-9, rel=1e-9)

    def test_subdivision_limit_flags_non_convergence(self):
        cfg = QuadratureConfig(max_subdivisions=1)
        result = integrate_finite(lambda x: 1e-3 / ((x - 0.37) ** 2 + 1e-6), 0.0, 1.0, cfg)
        assert not result.converged
        assert result.subdivisions_used == 1

    def test_roundoff_floor_counts_as_converged(self):
        # Exact cancellation: only the floor is reachable
        result = integrate_finite(lambda x: np.sin(x) * np.cos(x) ** 2 * np.exp(np.cos(x)), 0.0, 2.0 * math.pi)
        assert result.converged
        assert abs(result.value) <= 2.0 * roundoff_floor(result.abs_integral) + 1e-15

    def test_non_finite_integrand_raises(self):
        with pytest.raises(IntegrandError):
            integrate_finite(lambda x: np.where(x > 0.5, np.inf, x), 0.0, 1.0)

    def test_bad_shape_raises(self):
        with pytest.raises(IntegrandError):
            integrate_finite(lambda x: np.ones(3), 0.0, 1.0)

    def test_constant_integrand_broadcasts(self):
        assert integrate_finite(lambda x: 2.0, 0.0, 3.0).value == pytest.approx(6.0, rel=1e-15)

    @pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
    def test_bad_limits(self, a, b):
        with pytest.raises(InvalidParameterError):
            integrate_finite(np.sin, a, b)


class TestQuadratureConfig:
    def test_needs_a_positive_tolerance(self):
        with pytest.raises(InvalidParameterError):
            QuadratureConfig(rel_tol=0.0, abs_tol=0.0)

    def test_rejects_non_finite_breakpoints(self):
        with pytest.raises(InvalidParameterError):
            QuadratureConfig(breakpoints=(1.0, math.nan))

    def test_with_breakpoints(self):
        cfg = QuadratureConfig(rel_tol=1e-6).with_breakpoints([2, 1])
        assert cfg.breakpoints == (2.0, 1.0)
        assert cfg.rel_tol == 1e-6


class TestIntegrateSemiInfinite:
    def test_exponential(self):
        result = integrate_semi_infinite(lambda x: np.exp(-x), decay_rate=1.0)
        assert result.converged
        assert result.value == pytest.approx(1.0, rel=1e-10)
        assert result.cutoff >= 20.0

    def test_sinh2_fifth_moment(self):
        result = integrate_semi_infinite(lambda x: x ** 5 * inv_sinh2(x), decay_rate=2.0)
        assert result.converged
        assert result.value == pytest.approx(SINH2_FIFTH_MOMENT, rel=1e-6)

    def test_polynomial_prefactor_extends_cutoff(self):
        # bulk sits near x = 12; the tail bound forces extensions
        result = integrate_semi_infinite(lambda x: x ** 12 * np.exp(-x), decay_rate=1.0)
        assert result.converged
        assert result.value == pytest.approx(math.factorial(12), rel=1e-8)
        assert result.cutoff > 20.0

    def test_error_includes_tail_and_covers_truth(self):
        cfg = QuadratureConfig(rel_tol=1e-6)
        result = integrate_semi_infinite(lambda x: np.exp(-0.5 * x), decay_rate=0.5, cfg=cfg)
        assert abs(result.value - 2.0) <= result.error_estimate

    @pytest.mark.parametrize("rel_tol", [1e-4, 1e-6, 1e-10])
    def test_converged_error_meets_the_target(self, rel_tol):
        cfg = QuadratureConfig(rel_tol=rel_tol)
        for f, rate in ((lambda x: x ** 12 * np.exp(-x), 1.0), (lambda x: np.exp(-0.5 * x) * np.cos(x), 0.5)):
            result = integrate_semi_infinite(f, decay_rate=rate, cfg=cfg)
            assert result.converged
            assert result.propagated_error == 0.0
            target = max(cfg.rel_tol * abs(result.value), ROUNDOFF_SLACK * roundoff_floor(result.abs_integral))
            assert result.error_estimate <= target

    def test_node_error_reaches_every_segment(self):
        plain = integrate_semi_infinite(lambda x: np.exp(-x), decay_rate=1.0)
        noisy = integrate_semi_infinite(lambda x: np.exp(-x), decay_rate=1.0,
                                        node_error=lambda x: np.full(np.shape(x), 1e-12))
        assert noisy.cutoff == plain.cutoff
        assert noisy.error_estimate == pytest.approx(plain.error_estimate + 1e-12 * plain.cutoff, rel=1e-9)
        assert noisy.propagated_error == pytest.approx(1e-12 * plain.cutoff, rel=1e-9)
        assert noisy.converged

    def test_lower_limit(self):
        result = integrate_semi_infinite(lambda x: np.exp(-x), decay_rate=1.0, lower=2.0)
        assert result.value == pytest.approx(math.exp(-2.0), rel=1e-10)

    def test_breakpoints_move_the_cut(self):
        cfg = QuadratureConfig(breakpoints=(50.0,))
        result = integrate_semi_infinite(lambda x: np.exp(-((x - 50.0) ** 2)), decay_rate=1.0, cfg=cfg)
        assert result.value == pytest.approx(math.sqrt(math.pi), rel=1e-9)
        assert result.cutoff >= 70.0

    @pytest.mark.parametrize("rate", [0.0, -1.0, math.nan])
    def test_bad_decay_rate(self, rate):
        with pytest.raises(InvalidParameterError):
            integrate_semi_infinite(lambda x: np.exp(-x), decay_rate=rate)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
