import math

import numpy as np
import pytest

from helpers import ang_dist
from majgeom.experiments import (
    SCAN_CHI1,
    SCAN_CHI2,
    SCAN_EPSILON,
    default_theta_grid,
    scan_state,
    singularity_scan,
    three_box_report,
)

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
THETA_B = math.atan(2 * math.sqrt(6.0))
THETA_C = math.atan(math.sqrt(1.5))


@pytest.fixture(scope="module")
def scan():
    return singularity_scan(count=512)


@pytest.fixture(scope="module")
def report():
    return three_box_report()


class TestSingularityScan:
    def test_default_parameters(self, scan):
        assert scan.epsilon == pytest.approx(math.asin(math.tan(math.pi / 6)))
        assert scan.chi1 == pytest.approx(4 * math.pi / 3)
        assert scan.chi2 == pytest.approx(2 * math.pi / 3)
        assert len(scan.records) == 512

    def test_bifurcation_location(self, scan):
        assert abs(scan.theta_bifurcation - THETA_B) <= 1e-10

    def test_singularity_location(self, scan):
        assert abs(scan.theta_singular - THETA_C) <= 1e-10

    def test_flags_bracket_special_points(self, scan):
        recs = scan.records
        singular = [k for k, r in enumerate(recs) if "singular" in r.flags]
        bifurcation = [k for k, r in enumerate(recs) if "bifurcation" in r.flags]
        assert len(singular) == 2 and singular[1] == singular[0] + 1
        assert recs[singular[0]].theta < THETA_C < recs[singular[1]].theta
        assert len(bifurcation) == 2 and bifurcation[1] == bifurcation[0] + 1
        assert recs[bifurcation[0]].theta < THETA_B < recs[bifurcation[1]].theta

    def test_omega2_single_jump(self, scan):
        recs = scan.records
        steps = [(k, recs[k + 1].omega2 - recs[k].omega2)
                 for k in range(len(recs) - 1)
                 if recs[k].omega2 is not None and recs[k + 1].omega2 is not None]
        big = [(k, s) for k, s in steps if abs(s) > 0.1]
        assert len(big) == 1
        gap_index, jump = big[0]
        assert recs[gap_index].theta < THETA_C < recs[gap_index + 1].theta
        assert abs(jump - 2 * math.pi) <= 0.05
        assert abs(scan.omega2_jump - jump) <= 1e-12

    def test_omega1_continuous(self, scan):
        recs = scan.records
        steps = [abs(recs[k + 1].omega1 - recs[k].omega1)
                 for k in range(len(recs) - 1)
                 if recs[k].omega1 is not None and recs[k + 1].omega1 is not None]
        assert max(steps) < 0.1

    def test_omega_sums(self, scan):
        for r in scan.records:
            if r.omega1 is None or r.omega2 is None:
                continue
            total = r.omega1 + r.omega2
            target = 0.0 if r.theta < scan.theta_singular else 2 * math.pi
            assert abs(total - target) <= 1e-8

    def test_omega_sums_at_quoted_thetas(self):
        scan = singularity_scan(np.array([0.25 * math.pi, 0.30 * math.pi]))
        r_lo, r_hi = scan.records
        assert abs(r_lo.omega1 + r_lo.omega2) <= 1e-8
        assert abs(r_hi.omega1 + r_hi.omega2 - 2 * math.pi) <= 1e-8

    def test_polar_angles_degenerate_below_bifurcation(self, scan):
        for r in scan.records:
            if r.theta < THETA_B - 1e-6:
                assert abs(r.beta1 - r.beta2) <= 1e-9
                assert ang_dist(r.alpha1 + r.alpha2, SCAN_CHI1) <= 1e-9
            elif r.theta > THETA_B + 1e-6:
                assert ang_dist(r.alpha1, SCAN_CHI1 / 2) <= 1e-9
                assert ang_dist(r.alpha2, SCAN_CHI1 / 2) <= 1e-9

    def test_geometric_matches_direct(self, scan):
        for r in scan.records:
            if r.wv_modulus is None or r.wv_direct is None:
                continue
            geometric = r.wv_modulus * np.exp(1j * r.wv_argument)
            direct = r.wv_direct.rect
            assert abs(geometric - direct) <= 1e-8 * max(1.0, abs(direct))

    def test_closed_form_weak_value(self, scan):
        for r in scan.records[::17]:
            if r.wv_modulus is None:
                continue
            expected = 1.0 / (1.0 - math.sqrt(2.0 / 3.0) * math.tan(r.theta))
            geometric = r.wv_modulus * np.exp(1j * r.wv_argument)
            assert abs(geometric - expected) <= 1e-9 * max(1.0, abs(expected))

    def test_argument_jump_is_pi(self, scan):
        recs = scan.records
        below = [r for r in recs if r.theta < THETA_C - 0.05 and r.wv_argument is not None]
        above = [r for r in recs if r.theta > THETA_C + 0.05 and r.wv_argument is not None]
        assert all(abs(r.wv_argument) <= 1e-8 for r in below)
        assert all(ang_dist(r.wv_argument, math.pi) <= 1e-8 for r in above)

    def test_runtime(self):
        import time
        start = time.perf_counter()
        singularity_scan(count=512)
        assert time.perf_counter() - start < 5.0

    def test_custom_grid_validation(self):
        with pytest.raises(ValueError):
            singularity_scan(np.array([0.3, 0.2]))
        with pytest.raises(ValueError):
            singularity_scan(np.array([0.0, 0.3]))

    def test_near_degenerate_flagging(self):
        grid = np.array([THETA_B - 1e-5, THETA_B - 1e-9, THETA_B + 1e-5])
        scan = singularity_scan(grid)
        assert "near_degenerate" in scan.records[1].flags

    def test_default_grid_properties(self):
        grid = default_theta_grid(512)
        assert grid.size == 512
        assert grid[0] > 0.0 and grid[-1] < math.pi / 2
        assert np.all(np.diff(grid) > 0)


class TestThreeBoxReport:
    def test_frame_vectors(self, report):
        assert np.max(np.abs(report.i_vec - np.array([0, 0, 1.0]))) <= 1e-12
        expected_f = np.array([2 * SQ2, 0.0, -1.0]) / 3.0
        assert np.max(np.abs(report.f_vec - expected_f)) <= 1e-12

    def test_factor_moduli(self, report):
        expected = {
            "box1": (1.0, 1.0),
            "box2": (math.sqrt(2 + SQ3), math.sqrt(2 - SQ3)),
            "box3": (1.0, 1.0),
        }
        for box in report.boxes:
            for factor, value in zip(box.factors, expected[box.name]):
                assert abs(factor.modulus - value) <= 1e-9

    def test_factor_solid_angles(self, report):
        corner = 2 * math.atan(math.sqrt(3 + 2 * SQ3))
        expected = {
            "box1": (-corner, corner),
            "box2": (0.0, 2 * math.pi),
            "box3": (0.0, 0.0),
        }
        for box in report.boxes:
            for factor, value in zip(box.factors, expected[box.name]):
                assert abs(factor.solid_angle - value) <= 1e-9

    def test_box_weak_values(self, report):
        expected = (1.0, -1.0, 1.0)
        for box, value in zip(report.boxes, expected):
            assert abs(box.weak_value - value) <= 1e-10
            assert abs(box.weak_value_direct - value) <= 1e-10
        assert abs(report.weak_value_sum - 1.0) <= 1e-10

    def test_point_closed_forms(self, report):
        x = 2.0 - SQ3
        q = 3 ** 0.25
        expected = {
            "box1": np.array([[-SQ2 * x, q * math.sqrt(6 * x), -x],
                              [-SQ2 * x, -q * math.sqrt(6 * x), -x]]) / SQ3,
            "box2": np.array([[SQ2, 0.0, 1.0], [-SQ2, 0.0, -1.0]]) / SQ3,
            "box3": np.array([[2 * math.sqrt(x * (1 + q * math.sqrt(x))), 0.0,
                               x - 2 * q * math.sqrt(x)],
                              [-2 * math.sqrt(x * (1 - q * math.sqrt(x))), 0.0,
                               x + 2 * q * math.sqrt(x)]]) / SQ3,
        }
        for box in report.boxes:
            assert np.max(np.abs(box.points - expected[box.name])) <= 1e-12

    def test_normalization_factors(self, report):
        by_name = {box.name: box for box in report.boxes}
        assert abs(1.0 / by_name["box2"].normalization - SQ2) <= 1e-12
        assert abs(1.0 / by_name["box1"].normalization - (2 * SQ3 - 2)) <= 1e-12
        assert abs(1.0 / by_name["box3"].normalization - (2 * SQ3 - 2)) <= 1e-12

    def test_entropies(self, report):
        expected = -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75)
        by_name = {box.name: box for box in report.boxes}
        assert abs(by_name["box1"].entropy - expected) <= 1e-10
        assert abs(by_name["box3"].entropy - expected) <= 1e-10
        assert round(by_name["box1"].entropy, 2) == 0.81
        assert by_name["box2"].entropy == pytest.approx(1.0, abs=1e-12)

    def test_abl_probabilities(self, report):
        assert report.abl_one_box["box1"] == pytest.approx(1.0, abs=1e-12)
        assert report.abl_one_box["box3"] == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(report.abl_all_boxes - 1.0 / 3.0)) <= 1e-12

    def test_symmetry_checks(self, report):
        assert all(report.symmetry_checks.values()), report.symmetry_checks

    def test_conjugate_factor_pair(self, report):
        box1 = report.boxes[0]
        assert abs(box1.factors[0].value
                   - np.conj(box1.factors[1].value)) <= 1e-10

    def test_r_basis_states(self, report):
        by_name = {box.name: box for box in report.boxes}
        assert np.max(np.abs(by_name["box1"].r_basis
                             - np.array([SQ3 / 2, 0.0, 0.5]))) <= 1e-9
        assert np.max(np.abs(by_name["box2"].r_basis
                             - np.array([0.0, 1.0, 0.0]))) <= 1e-9
        assert np.max(np.abs(by_name["box3"].r_basis
                             - np.array([-0.5, 0.0, SQ3 / 2]))) <= 1e-9

    def test_bell_overlaps_vanish(self, report):
        by_name = {box.name: box for box in report.boxes}
        assert abs(by_name["box1"].bell_overlap) <= 1e-10
        assert abs(by_name["box3"].bell_overlap) <= 1e-10

    def test_closest_separable_states(self, report):
        by_name = {box.name: box for box in report.boxes}
        r1 = by_name["box2"].points[0]
        assert np.max(np.abs(by_name["box1"].closest_separable + r1)) <= 1e-9
        assert np.max(np.abs(by_name["box3"].closest_separable - r1)) <= 1e-9
        assert by_name["box2"].closest_separable is None

    def test_runtime(self):
        import time
        start = time.perf_counter()
        three_box_report()
        assert time.perf_counter() - start < 1.0


def test_scan_state_parametrization():
    state = scan_state(0.3, SCAN_EPSILON, SCAN_CHI1, SCAN_CHI2)
    assert abs(np.linalg.norm(state) - 1.0) <= 1e-12
    assert abs(abs(state[2]) - math.cos(0.3)) <= 1e-12
