#!/usr/bin/env python3
"""
Tests for lab-frame and co-moving radiation forces

All physics runs in reduced units (hbar = k_B = c = 1) with the bath at
T2 = 1, so thermal frequencies equal temperatures.
"""
import itertools
import math
import os
import sys

import numpy as np
import pytest

# Add the current directory to the path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from bbfriction.constants import REDUCED_UNITS
from bbfriction.errors import InvalidParameterError, UnsupportedEvaluationError
from bbfriction.physics_core import (
    BathSpec,
    KinematicState,
    ParticleSpec,
    make_delta_model,
    make_lorentz_model,
)
from bbfriction.quadrature import QuadratureConfig
from bbfriction.radiation_forces import (
    evaluate_forces,
    force_comoving,
    force_comoving_direct,
    force_comoving_from_lab,
    force_lab,
    force_mkrtchian,
    force_nonrel,
    force_scale,
    heating_rate_lab,
    kernel_K,
    kernel_K_direct,
    lab_braces,
    normalized_force,
    weight_comoving,
    weight_lab,
)

OMEGA0 = 5.0
MODEL = make_lorentz_model(alpha0=1.0, omega0=OMEGA0, gamma_d=1.0)
BATH = BathSpec(T2=1.0, constants=REDUCED_UNITS)


def particle(T1=1.0, model=MODEL):
    return ParticleSpec(mass=1.0, radius=1e-3, T1=T1, model=model)


def agree(a, b, rel=1e-6):
    """Values agree to rel of the second."""
    return abs(a.value - b.value) <= rel * abs(b.value)


class TestWeights:
    def test_comoving_weights_sum_to_two(self):
        mu = np.linspace(-1.0, 1.0, 11)
        for theta in (0.0, 0.4, math.pi / 2, 2.5):
            A, B = weight_comoving(mu, theta)
            np.testing.assert_allclose(A + B, 2.0, rtol=1e-15)

    def test_comoving_weights_along_axis(self):
        mu = np.linspace(-1.0, 1.0, 11)
        A, B = weight_comoving(mu, 0.0)
        np.testing.assert_allclose(A, 1.0 - mu * mu, atol=1e-16)
        np.testing.assert_allclose(B, 1.0 + mu * mu, atol=1e-16)

    def test_lab_weights_reduce_at_rest(self):
        mu = np.linspace(-1.0, 1.0, 11)
        for theta in (0.0, 1.1):
            np.testing.assert_allclose(weight_lab(0.0, mu, theta), weight_comoving(mu, theta), rtol=1e-15)


class TestKernel:
    def test_vanishes_at_rest(self):
        for weight in ("A", "B"):
            assert kernel_K(weight, 1.0, 0.0, 0.3, 1.0, constants=REDUCED_UNITS).value == 0.0

    def test_negative_for_motion(self):
        for weight in ("A", "B"):
            assert kernel_K(weight, 1.3, 0.4, 0.5, 1.0, constants=REDUCED_UNITS).value < 0

    def test_negative_over_random_states(self):
        rng = np.random.default_rng(2024)
        for beta, theta, omega in zip(rng.uniform(0.01, 0.95, 30), rng.uniform(0.0, math.pi, 30),
                                      rng.uniform(0.01, 20.0, 30)):
            for weight in ("A", "B"):
                value = kernel_K(weight, omega, beta, theta, 1.0, constants=REDUCED_UNITS).value
                assert value < 0, (weight, beta, theta, omega)

    @pytest.mark.parametrize("omega", [0.05, 1.3, 12.0])
    def test_bose_form_matches_coth_definition(self, omega):
        for weight in ("A", "B"):
            folded = kernel_K(weight, omega, 0.4, 0.5, 1.0, constants=REDUCED_UNITS)
            direct = kernel_K_direct(weight, omega, 0.4, 0.5, 1.0, constants=REDUCED_UNITS)
            assert folded.value == pytest.approx(direct.value, rel=1e-7)

    def test_coth_definition_is_odd(self):
        for weight in ("A", "B"):
            plus = kernel_K_direct(weight, 0.8, 0.6, 0.2, 1.0, constants=REDUCED_UNITS)
            minus = kernel_K_direct(weight, -0.8, 0.6, 0.2, 1.0, constants=REDUCED_UNITS)
            assert minus.value == pytest.approx(-plus.value, rel=1e-12)

    def test_argument_validation(self):
        with pytest.raises(InvalidParameterError):
            kernel_K("C", 1.0, 0.3, 0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            kernel_K("A", -1.0, 0.3, 0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            kernel_K("A", 1.0, 1.0, 0.0, 1.0)


class TestLabBraces:
    def test_vanish_at_equilibrium(self):
        state = KinematicState(beta=0.0)
        mu = np.linspace(-1.0, 1.0, 7)
        for omega in (-7.0, 0.0, 0.3, 5.0, 60.0):
            b1, b2s = lab_braces(omega, mu, state, MODEL, 1.0, 1.0)
            assert np.all(b1 == 0.0)
            assert np.all(b2s == 0.0)

    def test_finite_limit_at_zero_frequency(self):
        state = KinematicState(beta=0.3, Omega=0.0)
        mu = 0.5
        w1, w2 = 0.7, 1.0
        q = state.gamma * (1.0 + state.beta * mu)
        b1, _ = lab_braces(0.0, mu, state, MODEL, w1, w2)
        assert b1 == pytest.approx(2.0 * MODEL.slope_at_zero * (q * w2 - w1), rel=1e-14)

    def test_match_raw_coth_form(self):
        state = KinematicState(beta=0.4, Omega=1.5)
        omega, mu, w1, w2 = 2.0, 0.3, 0.7, 1.0
        g = state.gamma * omega * (1.0 + state.beta * mu)
        g2 = g + state.Omega
        b1, b2s = lab_braces(omega, mu, state, MODEL, w1, w2)
        coth = lambda y: 1.0 / math.tanh(y)
        expected_b1 = MODEL.alpha_imag(g) * (coth(omega / (2 * w2)) - coth(g / (2 * w1)))
        expected_b2s = omega * MODEL.alpha_imag(g2) * (coth(omega / (2 * w2)) - coth(g2 / (2 * w1)))
        assert b1 == pytest.approx(expected_b1, rel=1e-12)
        assert b2s == pytest.approx(expected_b2s, rel=1e-12)

    def test_shifted_frequency_of_opposite_sign(self):
        # omega < 0 < g2 exercises the vacuum-sign term
        state = KinematicState(beta=0.2, Omega=0.5)
        omega, mu, w1, w2 = -0.3, 0.9, 1.3, 1.0
        g2 = state.gamma * omega * (1.0 + state.beta * mu) + state.Omega
        _, b2s = lab_braces(omega, mu, state, MODEL, w1, w2)
        coth = lambda y: 1.0 / math.tanh(y)
        expected = omega * MODEL.alpha_imag(g2) * (coth(omega / (2 * w2)) - coth(g2 / (2 * w1)))
        assert b2s == pytest.approx(expected, rel=1e-12)


class TestSignStructure:
    @pytest.mark.parametrize("Omega, theta, T1", [(0.0, 0.0, 1.0), (2.0, 0.7, 0.4), (4.0, math.pi / 2, 3.0)])
    def test_lab_force_vanishes_at_rest(self, Omega, theta, T1):
        state = KinematicState(beta=0.0, Omega=Omega, theta=theta)
        assert force_lab(state, particle(T1), BATH).value == 0.0

    def test_no_heating_at_equilibrium(self):
        assert heating_rate_lab(KinematicState(beta=0.0), particle(1.0), BATH).value == 0.0

    @pytest.mark.parametrize("T1, sign", [(0.5, 1.0), (2.0, -1.0)])
    def test_heat_flows_towards_the_colder_body(self, T1, sign):
        Q = heating_rate_lab(KinematicState(beta=0.0), particle(T1), BATH)
        assert Q.converged
        assert math.copysign(1.0, Q.value) == sign

    def test_comoving_force_vanishes_at_rest(self):
        assert force_comoving(KinematicState(beta=0.0, Omega=3.0), particle(), BATH).value == 0.0
        assert force_comoving_from_lab(KinematicState(beta=0.0), particle(), BATH).value == 0.0

    @pytest.mark.parametrize("beta", [0.05, 0.5, 0.9])
    def test_friction_without_rotation(self, beta):
        estimate = force_comoving(KinematicState(beta=beta), particle(), BATH)
        assert estimate.converged
        assert estimate.value < 0


class TestFrameIdentity:
    def test_reference_state(self):
        state = KinematicState(beta=0.5, Omega=0.4 * OMEGA0, theta=math.pi / 3)
        direct = force_comoving(state, particle(3.0), BATH)
        combo = force_comoving_from_lab(state, particle(3.0), BATH)
        assert direct.converged and combo.converged
        assert agree(combo, direct)

    def test_error_estimates_are_tight(self):
        state = KinematicState(beta=0.5, Omega=0.4 * OMEGA0, theta=math.pi / 3)
        direct = force_comoving(state, particle(3.0), BATH)
        two_sided = force_comoving_direct(state, particle(3.0), BATH)
        assert 0.0 < direct.error < 1e-4 * abs(direct.value)
        assert 0.0 < two_sided.error < 1e-4 * abs(two_sided.value)
        assert 0.0 < heating_rate_lab(state, particle(3.0), BATH).error

    def test_grid(self):
        grid = itertools.product((0.1, 0.5, 0.9), (0.0, math.pi / 4, math.pi / 2), (0.0, 0.3, 0.8), (0.3, 1.0, 3.0))
        for beta, theta, u, T1 in grid:
            state = KinematicState(beta=beta, Omega=u * OMEGA0, theta=theta)
            breakdown = evaluate_forces(state, particle(T1), BATH)
            assert breakdown.converged, (beta, theta, u, T1)
            gap = abs(breakdown.F_prime_x - breakdown.F_prime_from_lab)
            allowed = 1e-6 * abs(breakdown.F_prime_x)
            assert gap <= allowed, (beta, theta, u, T1, gap, allowed)

    def test_independent_of_particle_temperature(self):
        state = KinematicState(beta=0.5, Omega=2.0, theta=math.pi / 3)
        reference = force_comoving_from_lab(state, particle(1.0), BATH)
        for T1 in (0.3, 3.0, 10.0):
            assert agree(force_comoving_from_lab(state, particle(T1), BATH), reference)

    def test_direct_two_sided_form_matches_fold(self):
        state = KinematicState(beta=0.2, Omega=1.0, theta=0.4)
        assert agree(force_comoving_direct(state, particle(), BATH), force_comoving(state, particle(), BATH))

    def test_tilt_does_not_matter_without_rotation(self):
        values = [force_comoving(KinematicState(beta=0.3, theta=theta), particle(), BATH).value
                  for theta in (0.0, math.pi / 4, math.pi / 2)]
        lab = [force_comoving_from_lab(KinematicState(beta=0.3, theta=theta), particle(), BATH).value
               for theta in (0.0, math.pi / 4, math.pi / 2)]
        for value in values[1:]:
            assert value == pytest.approx(values[0], rel=1e-8)
        for value in lab[1:]:
            assert value == pytest.approx(lab[0], rel=1e-7)
        assert lab[0] == pytest.approx(values[0], rel=1e-6)


class TestSlowMotion:
    def test_zero_velocity(self):
        assert force_nonrel(0.0, 2.0, 0.3, MODEL, 1.0, constants=REDUCED_UNITS).value == 0.0
        assert force_mkrtchian(0.0, MODEL, 1.0, constants=REDUCED_UNITS).value == 0.0

    def test_rotating_form_reduces_without_rotation(self):
        for theta in (0.0, 1.2):
            rotating = force_nonrel(0.01, 0.0, theta, MODEL, 1.0, constants=REDUCED_UNITS)
            plain = force_mkrtchian(0.01, MODEL, 1.0, constants=REDUCED_UNITS)
            assert rotating.value == pytest.approx(plain.value, rel=1e-7)

    def test_always_friction(self):
        for T2 in (0.3, 1.0, 4.0):
            assert force_mkrtchian(0.1, MODEL, T2, constants=REDUCED_UNITS).value < 0

    def test_narrow_line_limit(self):
        narrow = make_lorentz_model(alpha0=1.0, omega0=OMEGA0, gamma_d=1e-3 * OMEGA0)
        V = 1e-3
        estimate = force_mkrtchian(V, narrow, 1.0, QuadratureConfig(rel_tol=1e-9), REDUCED_UNITS)
        assert estimate.value / force_scale(V, narrow, REDUCED_UNITS) == pytest.approx(-0.068297, rel=1e-2)

    def test_relativistic_correction_is_second_order(self):
        cfg = QuadratureConfig(rel_tol=1e-11)
        Omega, theta = 1.5, 0.5

        def gap(beta):
            full = force_comoving(KinematicState(beta=beta, Omega=Omega, theta=theta), particle(), BATH, cfg)
            slow = force_nonrel(beta, Omega, theta, MODEL, 1.0, cfg, REDUCED_UNITS)
            return abs(full.value / slow.value - 1.0)

        assert 3.5 <= gap(0.02) / gap(0.01) <= 4.5

    def test_delta_model_is_rejected(self):
        delta = make_delta_model(alpha0=1.0, omega0=OMEGA0)
        with pytest.raises(UnsupportedEvaluationError):
            force_comoving(KinematicState(beta=0.1), particle(model=delta), BATH)
        with pytest.raises(UnsupportedEvaluationError):
            force_nonrel(0.1, 0.0, 0.0, delta, 1.0, constants=REDUCED_UNITS)

    def test_negative_velocity_is_rejected(self):
        with pytest.raises(InvalidParameterError):
            force_mkrtchian(-1.0, MODEL, 1.0, constants=REDUCED_UNITS)


class TestNormalization:
    def test_breakdown_normalized_force(self):
        state = KinematicState(beta=0.2)
        breakdown = evaluate_forces(state, particle(), BATH)
        scale = force_scale(0.2, MODEL, REDUCED_UNITS)
        assert breakdown.f_normalized == pytest.approx(breakdown.F_prime_x / scale, rel=1e-14)

    def test_zero_at_rest(self):
        assert normalized_force(0.0, 0.0, MODEL, REDUCED_UNITS) == 0.0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
