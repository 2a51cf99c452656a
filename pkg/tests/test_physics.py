import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpurify import (
    BlochState,
    DeviceParams,
    bias_from_omega_z,
    effective_capacitance,
    energy_levels,
    feedback_axis_angle,
    impurity,
    omega_z_from_bias,
    pulse_plan,
    tilted_axis_angle,
)
from qpurify.physics import HBAR, E_CHARGE

AF = 1e-18


@pytest.fixture(scope="module")
def params():
    return DeviceParams.default()


class TestEffectiveCapacitance:
    def test_reference_values(self):
        c = effective_capacitance(500 * AF, 0.5 * AF, 1.0 * AF)
        assert c == pytest.approx(500.3333333333333 * AF, rel=1e-12)

    def test_zero_parasitic_collapses_to_junction(self):
        assert effective_capacitance(500 * AF, 0.5 * AF, 0.0) == pytest.approx(500 * AF)

    def test_symmetric_case(self):
        c = 3.7 * AF
        assert effective_capacitance(c, c, c) == pytest.approx(1.5 * c, rel=1e-12)

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            effective_capacitance(-1 * AF, 0.5 * AF, 1 * AF)
        with pytest.raises(ValueError):
            effective_capacitance(1 * AF, 0.0, 1 * AF)

    def test_against_exact_rational_arithmetic(self):
        # 100 random rational triples evaluated exactly with Fraction
        rng = np.random.default_rng(7)
        for _ in range(100):
            a, b, c = (int(v) for v in rng.integers(1, 10_000, size=3))
            exact = (Fraction(b, 1) * a + Fraction(a, 1) * c + Fraction(c, 1) * b) / (
                Fraction(b, 1) + c
            )
            got = effective_capacitance(float(a), float(b), float(c))
            assert got == pytest.approx(float(exact), rel=1e-12)


class TestBiasMapping:
    def test_degeneracy_halts_rotation(self, params):
        assert omega_z_from_bias(0.5, params) == 0.0

    def test_range_endpoint_matches_josephson_rate(self, params):
        # the quoted control range endpoint is where |omega_z| reaches nu
        wz = omega_z_from_bias(0.5323, params)
        assert wz < 0.0
        assert abs(wz) == pytest.approx(params.nu, rel=5e-3)

    def test_strong_bias_ratio(self, params):
        ratio = abs(omega_z_from_bias(0.70, params)) / params.nu
        assert ratio == pytest.approx(6.1943, abs=0.01)

    def test_affine_with_negative_slope(self, params):
        w1 = omega_z_from_bias(0.4, params)
        w2 = omega_z_from_bias(0.6, params)
        w3 = omega_z_from_bias(0.8, params)
        assert w1 > 0.0 > w2 > w3
        assert w1 - w2 == pytest.approx(w2 - w3, rel=1e-12)

    def test_inverse_at_zero(self, params):
        assert bias_from_omega_z(0.0, params) == 0.5

    def test_inverse_at_minus_nu(self, params):
        assert bias_from_omega_z(-params.nu, params) == pytest.approx(0.5323, abs=1e-4)

    @pytest.mark.parametrize("n_g", [0.4, 0.5, 0.7])
    def test_round_trip(self, params, n_g):
        assert bias_from_omega_z(omega_z_from_bias(n_g, params), params) == pytest.approx(
            n_g, rel=1e-14
        )


class TestEnergyLevels:
    def test_minimum_splitting_at_degeneracy(self, params):
        lo, hi = energy_levels(0.5, params)
        assert hi - lo == pytest.approx(HBAR * params.nu, rel=1e-12)
        assert lo == -hi

    def test_vanishing_tunnelling_gives_electrostatic_gap(self):
        p = DeviceParams(nu=1e-6, c_j=500 * AF, c_g=0.5 * AF, c_p=1.0 * AF, gamma=0.0)
        lo, hi = energy_levels(0.3, p)
        e_el = (2 * E_CHARGE) ** 2 / p.c_q * 0.2
        assert hi - lo == pytest.approx(abs(e_el), rel=1e-9)

    def test_symmetry_about_degeneracy(self, params):
        for n_g in (0.1, 0.37, 0.62):
            lo1, hi1 = energy_levels(n_g, params)
            lo2, hi2 = energy_levels(1.0 - n_g, params)
            assert hi1 - lo1 == pytest.approx(hi2 - lo2, rel=1e-12)


class TestImpurity:
    def test_completely_mixed(self):
        assert impurity(BlochState(0, 0, 0)) == 0.5

    def test_pure_states(self):
        assert impurity(BlochState(1, 0, 0)) == 0.0
        assert impurity(BlochState(0.6, 0, 0.8)) == pytest.approx(0.0, abs=1e-15)

    def test_length_validation(self):
        with pytest.raises(ValueError):
            BlochState(1.0, 0.1, 0.0)


class TestFeedbackAxisAngle:
    def test_maximum_is_45_degrees(self):
        assert feedback_axis_angle(0.7, 0.7) == pytest.approx(math.pi / 4, rel=1e-12)

    def test_reference_angle(self):
        angle = feedback_axis_angle(0.333, 1.0)
        assert angle == pytest.approx(0.5 * math.asin(0.333), rel=1e-14)
        assert math.degrees(angle) == pytest.approx(9.727, abs=2e-3)

    def test_threshold_above_length_rejected(self):
        with pytest.raises(ValueError):
            feedback_axis_angle(0.5, 0.4)

    def test_zero_threshold_rejected(self):
        with pytest.raises(ValueError):
            feedback_axis_angle(0.0, 0.5)


def _exact_pi_rotation(v, axis):
    axis = np.asarray(axis) / np.linalg.norm(axis)
    return 2.0 * np.dot(axis, v) * axis - np.asarray(v)


class TestPulsePlan:
    def test_45_degree_pulse(self, params):
        plan = pulse_plan(0.5, 0.5, +1.0, +1.0, params)
        assert abs(plan.omega_z) == pytest.approx(params.nu, rel=1e-12)
        assert plan.tau == pytest.approx(math.pi / (math.sqrt(2) * params.nu), rel=1e-12)
        assert plan.tau == pytest.approx(35.355e-12, rel=1e-3)

    def test_small_angle_limit_is_half_period(self, params):
        plan = pulse_plan(1e-8, 1.0, +1.0, +1.0, params)
        assert plan.tau == pytest.approx(math.pi / params.nu, rel=1e-6)
        assert plan.tau == pytest.approx(50e-12, rel=1e-3)

    def test_reference_bias(self, params):
        plan = pulse_plan(0.333, 1.0, +1.0, +1.0, params)
        assert plan.n_g == pytest.approx(0.50554, abs=2e-4)
        assert plan.n_g > 0.5  # first-quadrant pulses bias above degeneracy

    def test_landing_identity_all_quadrants(self, params):
        # a pi-rotation about the planned axis carries the trigger point
        # onto the target x-pole: the defining geometry, checked to 1e-12
        rng = np.random.default_rng(11)
        for _ in range(200):
            r = rng.uniform(0.05, 1.0)
            zl = rng.uniform(1e-3, 1.0) * r
            sx = rng.choice([-1.0, 1.0])
            sz = rng.choice([-1.0, 1.0])
            plan = pulse_plan(zl, r, sx, sz, params)
            start = np.array([sx * math.sqrt(r * r - zl * zl), 0.0, sz * zl])
            axis = np.array([-params.nu, 0.0, plan.omega_z])
            landed = _exact_pi_rotation(start, axis)
            target = np.array([sx * r, 0.0, 0.0])
            assert np.max(np.abs(landed - target)) < 1e-12

    @given(
        r=st.floats(0.05, 1.0),
        frac=st.floats(1e-6, 1.0),
        sx=st.sampled_from([-1.0, 1.0]),
        sz=st.sampled_from([-1.0, 1.0]),
    )
    @settings(max_examples=200, deadline=None)
    def test_bias_always_inside_control_range(self, r, frac, sx, sz):
        params = DeviceParams.default()
        plan = pulse_plan(frac * r, r, sx, sz, params)
        assert 0.4677 <= plan.n_g <= 0.5323
        assert 0.0 < plan.alpha <= math.pi / 4 + 1e-12


class TestTiltedAxisAngle:
    def test_zero_bias_rate(self, params):
        assert tilted_axis_angle(0.0, params) == 0.0

    def test_equal_rates_give_45(self, params):
        assert tilted_axis_angle(params.nu, params) == pytest.approx(math.pi / 4, rel=1e-12)

    def test_lock_bias_angle(self, params):
        deg = math.degrees(tilted_axis_angle(omega_z_from_bias(0.70, params), params))
        assert deg == pytest.approx(80.8, abs=1.5)

    def test_monotone_and_asymptoting(self, params):
        angles = [tilted_axis_angle(w * params.nu, params) for w in (0.5, 1, 3, 10, 100)]
        assert all(a < b for a, b in zip(angles, angles[1:]))
        assert angles[-1] < math.pi / 2


class TestDeviceParams:
    def test_default_matches_reference_table(self, params):
        assert params.nu == pytest.approx(2 * math.pi * 1e10)
        assert params.c_j == 500 * AF
        assert params.c_g == 0.5 * AF
        assert params.c_p == 1.0 * AF
        assert params.gamma == 7.5e7

    def test_c_q_recomputed(self, params):
        assert params.c_q == effective_capacitance(params.c_j, params.c_g, params.c_p)

    def test_validation(self):
        with pytest.raises(ValueError):
            DeviceParams(nu=0.0, c_j=1 * AF, c_g=1 * AF, c_p=1 * AF, gamma=1.0)
        with pytest.raises(ValueError):
            DeviceParams(nu=1.0, c_j=1 * AF, c_g=1 * AF, c_p=1 * AF, gamma=-1.0)
