import math

import numpy as np
import pytest

from orthokin.errors import InvalidParameterError
from orthokin.kinematics import (
    CrossSectionPoint,
    DesignParams,
    IkSolutionSet,
    JointConfig,
    SpatialPoint,
    cross_section_solutions,
    forward_kinematics,
    ik_polynomial,
    inverse_kinematics,
    jacobian_det,
    numeric_jacobian_det,
    reduced_fk,
    wrap_angle,
)

from _oracles import ik_count_bruteforce

P_FIG2 = DesignParams(2.0, 1.5, 1.0)   # quaternary, 4 cusps, no node
P_FIG3 = DesignParams(3.0, 4.0, 2.0)   # 2 cusps, 3 nodes, isolated points


def random_config(rng):
    return JointConfig(*rng.uniform(-np.pi, np.pi, 3))


class TestTypes:
    def test_design_params_positive(self):
        with pytest.raises(InvalidParameterError):
            DesignParams(-1.0, 1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            DesignParams(1.0, 0.0, 1.0)

    def test_from_raw_normalizes(self):
        p = DesignParams.from_raw(2.0, 6.0, 8.0, 4.0)
        assert (p.d3, p.d4, p.r2) == (3.0, 4.0, 2.0)
        with pytest.raises(InvalidParameterError):
            DesignParams.from_raw(0.0, 1.0, 1.0, 1.0)

    def test_joint_config_normalized_idempotent(self):
        q = JointConfig(3.5 * np.pi, -np.pi, np.pi)
        assert -np.pi <= q.theta1 < np.pi
        assert q.theta2 == -np.pi and q.theta3 == -np.pi
        q2 = JointConfig(q.theta1, q.theta2, q.theta3)
        assert q2 == q

    def test_wrap_angle_range(self):
        xs = np.linspace(-20, 20, 1001)
        w = wrap_angle(xs)
        assert np.all(w >= -np.pi) and np.all(w < np.pi)
        np.testing.assert_allclose(np.cos(w), np.cos(xs), atol=1e-12)


class TestForwardKinematics:
    def test_zero_configuration(self):
        pt = forward_kinematics(P_FIG2, JointConfig(0, 0, 0))
        np.testing.assert_allclose(pt.as_array(), [4.5, 1.0, 0.0], atol=1e-15)

    def test_base_rotation_leaves_section_invariant(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = random_config(rng)
            q2 = JointConfig(q.theta1 + np.pi, q.theta2, q.theta3)
            a = forward_kinematics(P_FIG2, q)
            b = forward_kinematics(P_FIG2, q2)
            assert math.hypot(a.x, a.y) == pytest.approx(math.hypot(b.x, b.y), abs=1e-12)
            assert a.z == pytest.approx(b.z, abs=1e-15)

    def test_second_axis_meeting_point(self):
        t3 = math.acos(-0.75)
        pt = forward_kinematics(P_FIG3, JointConfig(0, 0, t3))
        assert pt.z == pytest.approx(0.0, abs=1e-12)
        rho_expect = math.sqrt(1.0 + (math.sin(t3) * 4.0 + 2.0) ** 2)
        assert math.hypot(pt.x, pt.y) == pytest.approx(rho_expect, abs=1e-12)
        assert rho_expect == pytest.approx(4.752158, abs=1e-6)


class TestReducedFk:
    def test_zero_configuration(self):
        cs = reduced_fk(P_FIG2, 0.0, 0.0)
        assert cs.rho == pytest.approx(math.hypot(4.5, 1.0), abs=1e-15)
        assert cs.z == 0.0

    def test_matches_full_map_for_any_theta1(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            t1, t2, t3 = rng.uniform(-np.pi, np.pi, 3)
            pt = forward_kinematics(P_FIG3, JointConfig(t1, t2, t3))
            cs = reduced_fk(P_FIG3, t2, t3)
            assert math.hypot(pt.x, pt.y) == pytest.approx(cs.rho, abs=1e-12)
            assert pt.z == pytest.approx(cs.z, abs=1e-12)

    def test_theta2_mirror_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            t2, t3 = rng.uniform(-np.pi, np.pi, 2)
            a = reduced_fk(P_FIG2, t2, t3)
            b = reduced_fk(P_FIG2, -t2, t3)
            assert a.rho == pytest.approx(b.rho, abs=1e-14)
            assert a.z == pytest.approx(-b.z, abs=1e-14)

    def test_u_zero_kills_height(self):
        t3 = math.acos(-0.75)
        for t2 in np.linspace(-np.pi, np.pi, 17):
            assert reduced_fk(P_FIG3, t2, t3).z == pytest.approx(0.0, abs=1e-12)


class TestJacobianDet:
    def test_closed_form_values(self):
        assert jacobian_det(P_FIG2, JointConfig(0.3, 0, 0)) == pytest.approx(-3.5)
        for t2 in (0.0, 0.4, -1.2):
            got = jacobian_det(P_FIG2, JointConfig(0, t2, np.pi / 2))
            assert got == pytest.approx(2.0 * (1.0 + 2.0 * math.cos(t2)), abs=1e-12)
        t3 = math.acos(-0.75)
        assert jacobian_det(P_FIG3, JointConfig(0, 1.1, t3)) == pytest.approx(0.0, abs=1e-12)

    def test_constant_ratio_to_numeric_determinant(self):
        rng = np.random.default_rng(6)
        for p in (P_FIG2, P_FIG3, DesignParams(0.5, 1.2, 1.0)):
            ratios = []
            while len(ratios) < 100:
                q = random_config(rng)
                f = jacobian_det(p, q)
                if abs(f) < 0.1:
                    continue
                ratios.append(numeric_jacobian_det(p, q) / f)
            ratios = np.array(ratios)
            kappa = ratios.mean()
            assert np.max(np.abs(ratios - kappa)) < 1e-6 * abs(kappa)
            # Constant magnitude is d4; the pinned chain realizes +d4.
            assert abs(kappa) == pytest.approx(p.d4, rel=1e-6)

    def test_numeric_det_vanishes_on_singular_factor(self):
        t3 = math.acos(-0.75)
        val = numeric_jacobian_det(P_FIG3, JointConfig(0.2, 0.9, t3), h=1e-5)
        assert abs(val) < 1e-6

    def test_halving_h_shrinks_error_quadratically(self):
        q = JointConfig(0.3, 0.7, 1.1)
        exact = 1.5 * jacobian_det(P_FIG2, q)  # ratio constant = +d4
        e1 = abs(numeric_jacobian_det(P_FIG2, q, h=2e-4) - exact)
        e2 = abs(numeric_jacobian_det(P_FIG2, q, h=1e-4) - exact)
        assert e2 < e1 / 2.5

    def test_h_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            numeric_jacobian_det(P_FIG2, JointConfig(0, 0, 0), h=0.0)


class TestIkPolynomial:
    def test_constructed_targets_are_roots(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            p = DesignParams(*rng.uniform(0.3, 3.0, 3))
            t2, t3 = rng.uniform(-np.pi, np.pi, 2)
            target = reduced_fk(p, t2, t3)
            c = ik_polynomial(p, target)
            c = c / np.max(np.abs(c))
            t = math.tan(t3 / 2.0)
            residual = np.polyval(c, t) / (1.0 + t * t) ** 2
            assert abs(residual) < 1e-10

    def test_out_of_reach_has_no_solution(self):
        far = CrossSectionPoint(P_FIG2.reach * 1.5, 2.0)
        pairs, infinite = cross_section_solutions(P_FIG2, far)
        assert pairs == [] and not infinite

    def test_inner_region_target_has_four_roots(self):
        # (rho, z) = (2, 0) sits in the four-solution inner region
        assert ik_count_bruteforce(2, 1.5, 1, 2.0, 0.0) == 4
        pairs, _ = cross_section_solutions(P_FIG2, CrossSectionPoint(2.0, 0.0))
        assert len(pairs) == 4
        for t2, t3 in pairs:
            cs = reduced_fk(P_FIG2, t2, t3)
            assert cs.rho == pytest.approx(2.0, abs=1e-8)
            assert cs.z == pytest.approx(0.0, abs=1e-8)

    def test_rho_must_be_nonnegative(self):
        with pytest.raises(InvalidParameterError):
            ik_polynomial(P_FIG2, CrossSectionPoint(-1.0, 0.0))


class TestInverseKinematics:
    def test_roundtrip_contains_original(self):
        rng = np.random.default_rng(9)
        checked = 0
        while checked < 300:
            p = DesignParams(*rng.uniform(0.3, 3.0, 3))
            q = random_config(rng)
            if abs(jacobian_det(p, q)) < 1e-4:
                continue
            sols = inverse_kinematics(p, forward_kinematics(p, q))
            err = min(
                max(abs(wrap_angle(s.theta1 - q.theta1)),
                    abs(wrap_angle(s.theta2 - q.theta2)),
                    abs(wrap_angle(s.theta3 - q.theta3)))
                for s in sols.solutions)
            assert err < 1e-8
            checked += 1

    def test_every_solution_satisfies_forward_map(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            q = random_config(rng)
            target = forward_kinematics(P_FIG3, q)
            sols = inverse_kinematics(P_FIG3, target)
            assert len(sols) >= 1
            for s in sols.solutions:
                got = forward_kinematics(P_FIG3, s)
                np.testing.assert_allclose(got.as_array(), target.as_array(), atol=1e-7)

    def test_counts_match_bruteforce_and_are_even(self):
        rng = np.random.default_rng(12)
        for _ in range(60):
            rho = rng.uniform(0.0, P_FIG2.reach * 1.1)
            z = rng.uniform(-P_FIG2.reach, P_FIG2.reach)
            expected = ik_count_bruteforce(2, 1.5, 1, rho, z)
            pairs, infinite = cross_section_solutions(P_FIG2, CrossSectionPoint(rho, z))
            if infinite:
                continue
            assert len(pairs) == expected
            assert len(pairs) in (0, 2, 4)

    def test_isolated_point_flags_infinite(self):
        s3 = math.sqrt(7.0) / 4.0
        for sgn in (+1.0, -1.0):
            rho = math.sqrt(1.0 + (sgn * s3 * 4.0 + 2.0) ** 2)
            res = inverse_kinematics(P_FIG3, SpatialPoint(rho, 0.0, 0.0))
            assert res.multiplicity_flag == "infinite"

    def test_generic_reachable_counts(self):
        res = inverse_kinematics(P_FIG2, SpatialPoint(2.0, 0.0, 0.5))
        assert res.multiplicity_flag == "generic"
        assert len(res) in (2, 4)

    def test_quartic_residual_of_accepted_solutions(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            q = random_config(rng)
            target = forward_kinematics(P_FIG2, q)
            rho = math.hypot(target.x, target.y)
            coeffs = ik_polynomial(P_FIG2, CrossSectionPoint(rho, target.z))
            coeffs = coeffs / np.max(np.abs(coeffs))
            for s in inverse_kinematics(P_FIG2, target).solutions:
                t = math.tan(s.theta3 / 2.0)
                assert abs(np.polyval(coeffs, t)) / (1.0 + t * t) ** 2 < 1e-9
