"""Tests for unit conversion and geometry helpers."""

import math

import pytest

from uro_fsi.utils import (
    cap_volume,
    cmh2o_to_pa,
    m_to_mm,
    mm_to_m,
    ms_to_s,
    s_to_ms,
    sphere_volume,
    truncate_decimals,
)


class TestUnits:
    """Tests for unit conversions."""

    def test_length(self):
        """Test mm/m conversion both ways."""
        assert mm_to_m(45.0) == pytest.approx(0.045)
        assert m_to_mm(0.0435) == pytest.approx(43.5)

    def test_time(self):
        """Test ms/s conversion both ways."""
        assert ms_to_s(200.0) == pytest.approx(0.2)
        assert s_to_ms(0.105) == pytest.approx(105.0)

    def test_cmh2o(self):
        """Test 50 cmH2O is about the 4.9 kPa pulse amplitude."""
        assert cmh2o_to_pa(50.0) == pytest.approx(4903.325)
        assert cmh2o_to_pa(50.0) == pytest.approx(4900.0, rel=1e-3)


class TestVolumes:
    """Tests for sphere and cap volumes."""

    def test_sphere_volume(self):
        """Test the unit sphere."""
        assert sphere_volume(1.0) == pytest.approx(4.0 * math.pi / 3.0)

    def test_cap_full_and_half(self):
        """Test the cap below the top pole is the whole sphere, below the centre half of it."""
        assert cap_volume(2.0, 2.0) == pytest.approx(sphere_volume(2.0))
        assert cap_volume(2.0, 0.0) == pytest.approx(0.5 * sphere_volume(2.0))
        assert cap_volume(2.0, -2.0) == 0.0

    def test_cap_clamps_outside(self):
        """Test planes beyond the sphere are clamped."""
        assert cap_volume(1.0, 5.0) == pytest.approx(sphere_volume(1.0))
        assert cap_volume(1.0, -5.0) == 0.0


class TestTruncateDecimals:
    """Tests for truncate_decimals."""

    def test_truncates_toward_zero(self):
        """Test extra digits are dropped, not rounded."""
        assert truncate_decimals(1.26, 1) == 1.2
        assert truncate_decimals(1.55, 1) == 1.5
        assert truncate_decimals(-1.26, 1) == -1.2

    def test_exact_values_survive(self):
        """Test values already at the precision are unchanged."""
        assert truncate_decimals(1.3, 1) == 1.3
        assert truncate_decimals(2.0, 0) == 2.0
