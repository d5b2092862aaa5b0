"""Loaded runs of both presets against the published cough results.

Each preset is simulated once over the full pulse; expect a long runtime.
"""

import pytest

from uro_fsi.driver import run
from uro_fsi.models import DEFAULT_REFERENCES
from uro_fsi.scenario import preset
from uro_fsi.verification.oracles import DISPLACEMENT_RANGE, PEAK_BAND

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def reports():
    return {condition: run(preset(condition))[2] for condition in ("physiological", "pathological")}


class TestPeaks:
    """Tests for the simulated vesical pressure peaks."""

    @pytest.mark.parametrize("condition", ["physiological", "pathological"])
    def test_within_band(self, reports, condition):
        """Test each peak lies within the band around the published value."""
        report = reports[condition]
        assert not report.aborted, report.abort_reason
        target = DEFAULT_REFERENCES[condition].published_simulated
        assert report.peak_pressure == pytest.approx(target, rel=PEAK_BAND)

    def test_support_raises_peak(self, reports):
        """Test the supported bladder reaches the higher peak."""
        assert reports["physiological"].peak_pressure > reports["pathological"].peak_pressure


class TestDeformation:
    """Tests for the displacement extremes."""

    def test_pathological_magnitude(self, reports):
        """Test the largest displacement brackets the reported 2 cm."""
        low, high = DISPLACEMENT_RANGE
        assert low <= reports["pathological"].max_displacement <= high

    @pytest.mark.parametrize("condition", ["physiological", "pathological"])
    def test_upper_hemisphere_moves_most(self, reports, condition):
        """Test the largest displacement is above and the smallest below the centre."""
        report = reports[condition]
        assert report.max_displacement_location[1] > 0.0
        assert report.min_displacement_location[1] < 0.0


class TestEnergy:
    """Tests for the energy audit under load."""

    @pytest.mark.parametrize("condition", ["physiological", "pathological"])
    def test_within_tolerance(self, reports, condition):
        """Test the audited energy error stays within the preset tolerance."""
        report = reports[condition]
        assert not report.aborted, report.abort_reason
        assert report.max_energy_error <= 0.04
        assert len(report.energy_error_history) == 201
