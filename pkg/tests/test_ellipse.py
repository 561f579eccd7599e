import math

import numpy as np
import pytest

from eigenlab.ellipse import (
    alignment_metrics,
    ellipse_from_params,
    to_ellipse2d,
    to_ellipsoid,
)
from eigenlab.engine import qr_step
from eigenlab.errors import DimensionMismatch
from eigenlab.linalg import jacobi_eigen, scale_of
from eigenlab.sampling import rotated_diag, sample_psd
from eigenlab.svgplot import Overlay, overlays_for_matrix, render_svg_frame

from conftest import frob


class TestEllipse2D:
    def test_worked_example(self, worked_example):
        view = to_ellipse2d(worked_example)
        assert view.a == pytest.approx(2.0, abs=1e-12)
        assert view.b == pytest.approx(1.0, abs=1e-12)
        assert view.theta == pytest.approx(math.pi / 4, abs=1e-12)
        assert view.quadrant_sign == 1

    def test_diagonal(self):
        view = to_ellipse2d(np.diag([3.0, 1.0]))
        assert (view.a, view.b, view.theta, view.quadrant_sign) == (3.0, 1.0, 0.0, 0)

    def test_circle_convention(self):
        view = to_ellipse2d(np.diag([2.0, 2.0]))
        assert view.a == view.b == 2.0
        assert view.theta == 0.0

    def test_negative_offdiag_angle_and_quadrant(self):
        m = rotated_diag(-0.6, (2.0, 1.0))
        view = to_ellipse2d(m)
        assert view.theta == pytest.approx(-0.6, abs=1e-12)
        assert view.quadrant_sign == -1

    def test_rejects_wrong_dimension(self):
        with pytest.raises(DimensionMismatch):
            to_ellipse2d(np.eye(3))

    def test_angle_stays_in_fold_range(self):
        rng = np.random.default_rng(21)
        for _ in range(300):
            theta = rng.uniform(-math.pi, math.pi)
            m = rotated_diag(theta, (rng.uniform(1.0, 3.0), rng.uniform(0.1, 0.9)))
            view = to_ellipse2d(m)
            assert -math.pi / 2 < view.theta <= math.pi / 2

    def test_ascending_diagonal_reads_near_ninety_degrees(self):
        # major axis tilted just off the y-axis, read from either side of it
        view = to_ellipse2d(rotated_diag(-1e-3, (1.0, 2.0)))
        assert view.theta == pytest.approx(math.pi / 2 - 1e-3, abs=1e-9)
        view = to_ellipse2d(rotated_diag(1e-3, (1.0, 2.0)))
        assert view.theta == pytest.approx(1e-3 - math.pi / 2, abs=1e-9)

    def test_round_trip(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            m = sample_psd(rng, 2, lam_range=(0.05, 2.5))
            view = to_ellipse2d(m)
            rebuilt = ellipse_from_params(view.a, view.b, view.theta)
            assert frob(rebuilt - m) <= 1e-10 * scale_of(m)

    def test_axes_match_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            m = sample_psd(rng, 2, lam_range=(0.05, 2.5))
            view = to_ellipse2d(m)
            values = jacobi_eigen(m).eigenvalues
            assert abs(view.a - values[0]) <= 1e-12
            assert abs(view.b - values[1]) <= 1e-12

    def test_angle_scale_invariant_bitwise_for_powers_of_two(self):
        rng = np.random.default_rng(24)
        for _ in range(100):
            m = sample_psd(rng, 2)
            theta = to_ellipse2d(m).theta
            for lam in (0.25, 2.0, 1024.0):
                assert to_ellipse2d(lam * m).theta == theta

    def test_congruence_axes_preserved_by_step(self):
        rng = np.random.default_rng(25)
        for _ in range(100):
            m = sample_psd(rng, 2, lam_range=(0.05, 2.5))
            before = to_ellipse2d(m)
            after = to_ellipse2d(qr_step(m))
            assert abs(after.a - before.a) <= 1e-9 * max(before.a, 1e-12)
            assert abs(after.b - before.b) <= 1e-9 * max(before.a, 1e-12)


class TestEllipsoid:
    def test_diagonal(self):
        view = to_ellipsoid(np.diag([3.0, 2.0, 1.0]))
        assert view.axes == (3.0, 2.0, 1.0)
        assert np.array_equal(view.orientation, np.eye(3))

    def test_consistent_with_2d(self, worked_example):
        view = to_ellipsoid(worked_example)
        assert view.axes[0] == pytest.approx(2.0, abs=1e-12)
        assert view.axes[1] == pytest.approx(1.0, abs=1e-12)

    def test_scalar(self):
        view = to_ellipsoid(1.3 * np.eye(4))
        assert view.axes == (1.3, 1.3, 1.3, 1.3)
        assert np.array_equal(view.orientation, np.eye(4))


class TestAlignmentMetrics:
    def test_diagonal(self):
        met = alignment_metrics(np.diag([2.0, 1.0]))
        assert met.offdiag_norm == 0.0
        assert met.axis_ratio == pytest.approx(0.5, abs=1e-12)
        assert met.eccentricity_class == "Generic"

    def test_worked_example(self, worked_example):
        met = alignment_metrics(worked_example)
        assert met.offdiag_norm == pytest.approx(math.sqrt(0.5), abs=1e-12)
        assert met.axis_ratio == pytest.approx(0.5, abs=1e-12)

    def test_circle_class(self):
        m = rotated_diag(0.8, (1.0, 0.999999))
        assert alignment_metrics(m).eccentricity_class == "Circle"

    def test_pancake_class(self):
        m = rotated_diag(0.8, (1.0, 1e-4))
        assert alignment_metrics(m).eccentricity_class == "Pancake"

    def test_zero_matrix_counts_as_circle(self):
        met = alignment_metrics(np.zeros((2, 2)))
        assert met.axis_ratio == 1.0
        assert met.eccentricity_class == "Circle"


class TestSvgRendering:
    def test_unit_circle(self):
        svg = render_svg_frame([Overlay("input", to_ellipse2d(np.eye(2)), "blue")])
        assert svg.startswith('<?xml version="1.0"')
        assert "<ellipse" in svg and 'stroke="blue"' in svg
        assert svg.count("<ellipse") == 1
        assert ">input</text>" in svg  # legend entry
        assert svg.count("<line") == 2  # coordinate axes

    def test_worked_example_two_overlays(self, worked_example):
        svg = render_svg_frame(overlays_for_matrix(worked_example, ["input", "qr"]))
        assert svg.count("<ellipse") == 2
        assert 'stroke="blue"' in svg and 'stroke="red"' in svg
        # red output rotated to about 26.57 degrees
        assert f'rotate({math.degrees(0.4636476090008061):.6f})' in svg

    def test_degenerate_renders_segment(self):
        from eigenlab.ellipse import EllipseView2D

        view = EllipseView2D(a=2.0, b=0.0, theta=0.3, quadrant_sign=1)
        svg = render_svg_frame([Overlay("input", view, "blue")])
        assert "<line" in svg

    def test_deterministic_bytes(self, worked_example):
        overlays = overlays_for_matrix(worked_example, ["input", "qr", "lr"])
        assert render_svg_frame(overlays) == render_svg_frame(overlays)

    def test_3d_frame(self):
        rng = np.random.default_rng(26)
        m = sample_psd(rng, 3)
        svg = render_svg_frame(overlays_for_matrix(m, ["input", "qr"]))
        assert svg.count("<polyline") == 6  # three cross-sections per overlay
        assert svg.count("<ellipse") == 2  # one silhouette per overlay

    def test_lr_overlay_skipped_for_singular_matrix(self):
        overlays = overlays_for_matrix(np.diag([1.0, 0.0]), ["input", "lr"])
        assert [o.label for o in overlays] == ["input"]

    def test_empty_overlay_set_still_valid(self):
        svg = render_svg_frame([])
        assert svg.startswith('<?xml') and "</svg>" in svg
