"""Tests for the axisymmetric bladder/urethra profile."""

import math

import numpy as np
import pytest

from uro_fsi.errors import GeometryError
from uro_fsi.mesh.profile import build_profile


class TestBuildProfile:
    """Tests for build_profile."""

    def test_physiological_dimensions(self, physiological):
        """Test radius, tube length and support of the supported model."""
        profile = build_profile(physiological)
        assert profile.bladder_radius == pytest.approx(46.09, abs=0.01)
        assert profile.mid_radius == pytest.approx(profile.bladder_radius + 0.75)
        assert profile.tube_top_z - profile.tube_bottom_z == pytest.approx(20.0)
        assert profile.support is not None
        assert profile.support.r_inner == pytest.approx(3.6)
        assert profile.support.r_outer == 131.0
        assert profile.support.z_top == pytest.approx(profile.tube_top_z)

    def test_pathological_has_no_support(self, pathological):
        """Test the unsupported model."""
        assert build_profile(pathological).support is None

    def test_outlet_below_equator(self, physiological):
        """Test the neck lies on the lower hemisphere."""
        profile = build_profile(physiological)
        assert math.pi / 2 < profile.outlet_angle < math.pi
        assert profile.tube_top_z < -profile.bladder_radius * 0.9

    def test_urethra_too_wide(self, physiological):
        """Test a tube wider than the bladder opening is rejected."""
        with pytest.raises(GeometryError):
            build_profile(physiological.model_copy(update={"urethra_inner_radius": 50.0}))

    def test_fillet_too_tight(self, physiological):
        """Test a fillet smaller than half the wall is rejected."""
        with pytest.raises(GeometryError):
            build_profile(physiological.model_copy(update={"outlet_fillet_radius": 0.5}))


class TestSample:
    """Tests for AxisymProfile.sample."""

    def test_continuity(self, physiological):
        """Test points and tangents join smoothly at both transitions."""
        profile = build_profile(physiological)
        eps = 1e-9
        for s0 in (profile.arc_length, profile.arc_length + profile.fillet_length):
            pts, tan, _ = profile.sample([s0 - eps, s0 + eps])
            assert np.allclose(pts[0], pts[1], atol=1e-6)
            assert np.allclose(tan[0], tan[1], atol=1e-6)

    def test_end_points(self, physiological):
        """Test the strip starts on the axis and ends at the tube bottom."""
        profile = build_profile(physiological)
        pts, tan, thick = profile.sample([0.0, profile.total_length])
        assert np.allclose(pts[0], [0.0, profile.mid_radius])
        assert np.allclose(pts[1], [profile.tube_mid_radius, profile.tube_bottom_z])
        assert np.allclose(tan[1], [0.0, -1.0])
        assert thick[0] == 1.5
        assert thick[1] == 1.5

    def test_unit_tangents(self, physiological):
        """Test tangents are unit vectors along the whole strip."""
        profile = build_profile(physiological)
        _, tan, _ = profile.sample(np.linspace(0.0, profile.total_length, 400))
        assert np.allclose(np.linalg.norm(tan, axis=1), 1.0)

    def test_mid_surface_on_sphere(self, physiological):
        """Test the bladder polyline lies on the mid-surface sphere."""
        profile = build_profile(physiological)
        pts = profile.bladder_mid_surface(50)
        assert np.allclose(np.linalg.norm(pts, axis=1), profile.mid_radius)
