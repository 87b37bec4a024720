import math

import numpy as np
import pytest

from helpers import random_state
from majgeom.canonical import (
    StateAngles,
    anchor_gauge,
    build_U1,
    build_U2,
    canonical_f_vector,
    canonicalize_triple,
    extract_params,
    params_to_state,
    three_box_transform,
)
from majgeom.errors import EtaOutOfRange
from majgeom.majorana import discriminant_degeneracy, majorana_points, nlevel_state
from majgeom.numerics import unitarity_defect

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)


class TestExtractParams:
    def test_top_state_is_degenerate(self):
        p = extract_params([0.0, 0.0, 1.0])
        assert p.theta == pytest.approx(0.0, abs=1e-12)
        assert p.degenerate

    def test_equator_state(self):
        p = extract_params([1.0, 0.0, 0.0])
        assert p.theta == pytest.approx(math.pi / 2, abs=1e-12)
        assert p.epsilon == pytest.approx(0.0, abs=1e-12)
        assert p.chi1 == pytest.approx(0.0, abs=1e-12)

    def test_reconstruction(self):
        rng = np.random.default_rng(60)
        for _ in range(300):
            state = anchor_gauge(nlevel_state(random_state(rng, 3)))
            p = extract_params(state)
            assert not p.degenerate
            rebuilt = params_to_state(p)
            assert np.max(np.abs(rebuilt - state)) <= 1e-10
            assert 0.0 <= p.theta <= math.pi / 2
            assert 0.0 <= p.epsilon <= math.pi / 2
            assert 0.0 <= p.chi1 < 2 * math.pi
            assert 0.0 <= p.chi2 < 2 * math.pi

    def test_anchor_gauge_fallback(self):
        # vanishing third component: largest component anchors the phase
        state = np.array([0.8j, 0.6j, 0.0])
        gauged = anchor_gauge(state)
        assert gauged[0].imag == pytest.approx(0.0, abs=1e-15)
        assert gauged[0].real > 0


class TestBuildU1:
    def test_pole_state_third_row(self):
        u1 = build_U1([0.0, 0.0, 1.0])
        assert unitarity_defect(u1) <= 1e-12
        assert np.allclose(u1[2], [0, 0, 1])
        assert np.allclose(u1 @ np.array([0, 0, 1.0]), [0, 0, 1.0])

    def test_first_basis_state(self):
        u1 = build_U1([1.0, 0.0, 0.0])
        assert np.max(np.abs(u1 @ np.array([1.0, 0, 0]) - np.array([0, 0, 1.0]))) <= 1e-12

    def test_random_mapping_residual(self):
        rng = np.random.default_rng(61)
        for _ in range(1000):
            psi = anchor_gauge(nlevel_state(random_state(rng, 3)))
            u1 = build_U1(psi)
            assert unitarity_defect(u1) <= 1e-10
            mapped = u1 @ psi
            assert np.max(np.abs(mapped - np.array([0, 0, 1.0]))) <= 1e-10


class TestBuildU2:
    def test_eta_zero_fixed_point(self):
        u2 = build_U2([0.0, 0.0, 1.0])
        assert unitarity_defect(u2) <= 1e-12
        assert np.max(np.abs(u2 @ np.array([0, 0, 1.0]) - np.array([0, 0, 1.0]))) <= 1e-12

    def test_reference_permutation_matrix(self):
        # final state (sqrt2, 1, 1)/2 forces the plain swap of the first two axes
        u2 = build_U2(np.array([SQ2, 1.0, 1.0]) / 2.0)
        expected = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
        assert np.max(np.abs(u2 - expected)) <= 1e-12
        mapped = u2 @ (np.array([SQ2, 1.0, 1.0]) / 2.0)
        rep = majorana_points(mapped)
        ex = np.array([1.0, 0.0, 0.0])
        # coincident points sit on a double root: sqrt-of-eps conditioning
        assert np.max(np.abs(rep.points - ex)) <= 1e-7

    def test_collapses_final_state(self):
        rng = np.random.default_rng(62)
        for _ in range(1000):
            psi = anchor_gauge(nlevel_state(random_state(rng, 3)))
            u2 = build_U2(psi)
            assert unitarity_defect(u2) <= 1e-10
            assert discriminant_degeneracy(nlevel_state(u2 @ psi)) <= 1e-9
            fixed = u2 @ np.array([0, 0, 1.0])
            assert np.max(np.abs(fixed - np.array([0, 0, 1.0]))) <= 1e-12

    def test_canonical_form_of_mapped_state(self):
        rng = np.random.default_rng(63)
        for _ in range(100):
            psi = anchor_gauge(nlevel_state(random_state(rng, 3)))
            p = extract_params(psi)
            u2 = build_U2(psi)
            eta = p.theta
            expected = np.array([1 - math.cos(eta),
                                 math.sqrt(max(0.0, 2 * math.cos(eta) * (1 - math.cos(eta)))),
                                 math.cos(eta)])
            assert np.max(np.abs(u2 @ psi - expected)) <= 1e-9

    def test_eta_out_of_range_guard(self):
        from majgeom.canonical import build_U2_from_params
        with pytest.raises(EtaOutOfRange):
            build_U2_from_params(StateAngles(2.0, 0.3, 0.0, 0.0))


class TestCanonicalizeTriple:
    def test_pole_projector_and_final(self):
        rng = np.random.default_rng(64)
        psi_i = random_state(rng, 3)
        pole = np.array([0.0, 0.0, 1.0])
        triple = canonicalize_triple(psi_i, pole, pole)
        assert np.allclose(triple.r_vec, [0, 0, 1])
        assert np.max(np.abs(triple.f_vec - np.array([0, 0, 1.0]))) <= 1e-9

    def test_reference_scenario_frame(self):
        # projector on the pole with final state (sqrt2,1,1)/2 lands on e_z / e_x
        rng = np.random.default_rng(65)
        psi_i = random_state(rng, 3)
        triple = canonicalize_triple(psi_i, [0.0, 0.0, 1.0],
                                     np.array([SQ2, 1.0, 1.0]) / 2.0)
        assert np.allclose(triple.r_vec, [0, 0, 1])
        assert np.max(np.abs(triple.f_vec - np.array([1.0, 0, 0]))) <= 1e-10

    def test_posts_hold_for_random_triples(self):
        rng = np.random.default_rng(66)
        for _ in range(200):
            triple = canonicalize_triple(random_state(rng, 3), random_state(rng, 3),
                                         random_state(rng, 3))
            assert unitarity_defect(triple.u_total) <= 1e-10
            assert discriminant_degeneracy(triple.psi_r) <= 1e-9
            assert discriminant_degeneracy(triple.psi_f) <= 1e-9
            rep_f = majorana_points(triple.psi_f)
            assert np.max(np.abs(rep_f.points - triple.f_vec)) <= 1e-6
            rep_r = majorana_points(triple.psi_r)
            assert np.max(np.abs(rep_r.points - np.array([0, 0, 1.0]))) <= 1e-6
            assert np.max(np.abs(canonical_f_vector(triple.eta) - triple.f_vec)) <= 1e-12

    def test_weak_value_invariance(self):
        rng = np.random.default_rng(67)
        for _ in range(200):
            psi_i = nlevel_state(random_state(rng, 3))
            psi_r = nlevel_state(random_state(rng, 3))
            psi_f = nlevel_state(random_state(rng, 3))
            if abs(np.vdot(psi_f, psi_i)) < 1e-6:
                continue
            before = (np.vdot(psi_f, psi_r) * np.vdot(psi_r, psi_i)
                      / np.vdot(psi_f, psi_i))
            triple = canonicalize_triple(psi_i, psi_r, psi_f)
            after = (np.vdot(triple.psi_f, triple.psi_r)
                     * np.vdot(triple.psi_r, triple.psi_i)
                     / np.vdot(triple.psi_f, triple.psi_i))
            assert abs(before - after) <= 1e-10 * max(1.0, abs(before))


class TestThreeBoxTransform:
    def test_unitarity(self):
        u1, u2 = three_box_transform()
        assert unitarity_defect(u1) <= 1e-12
        assert unitarity_defect(u2) <= 1e-12

    def test_preselected_state_maps_to_north_pair(self):
        u1, u2 = three_box_transform()
        psi_i = np.ones(3) / SQ3
        rep = majorana_points(u2 @ u1 @ psi_i)
        # double-root conditioning bounds the recovered pair at ~1e-8
        assert np.max(np.abs(rep.points - np.array([0, 0, 1.0]))) <= 1e-7
        assert np.max(np.abs(rep.points.mean(axis=0)
                             / np.linalg.norm(rep.points.mean(axis=0))
                             - np.array([0, 0, 1.0]))) <= 1e-12

    def test_postselected_state_maps_to_coincident_pair(self):
        u1, u2 = three_box_transform()
        psi_f = np.array([1.0, -1.0, 1.0]) / SQ3
        rep = majorana_points(u2 @ u1 @ psi_f)
        expected = np.array([2 * SQ2, 0.0, -1.0]) / 3.0
        assert np.max(np.abs(rep.points - expected)) <= 1e-9

    def test_middle_box_maps_to_antipodal_pair(self):
        u1, u2 = three_box_transform()
        rep = majorana_points(u2 @ u1 @ np.array([0, 1.0, 0]))
        expected = np.array([SQ2, 0.0, 1.0]) / SQ3
        assert np.max(np.abs(rep.points[0] - expected)) <= 1e-9
        assert np.max(np.abs(rep.points[1] + expected)) <= 1e-9
