"""Tests for the clinical comparison."""

import pytest

from uro_fsi.errors import DomainError
from uro_fsi.export.clinical import compare_to_clinical, error_percent, format_comparison
from uro_fsi.models import DEFAULT_REFERENCES, ClinicalReference


class TestErrorPercent:
    """Tests for error_percent."""

    def test_exact_match(self):
        """Test a perfect prediction has zero error."""
        assert error_percent(6962.0, 6962.0) == 0.0

    def test_symmetric(self):
        """Test over- and under-prediction count the same."""
        assert error_percent(110.0, 100.0) == pytest.approx(error_percent(90.0, 100.0))

    def test_non_positive_reference(self):
        """Test a zero clinical pressure is rejected."""
        with pytest.raises(DomainError):
            error_percent(100.0, 0.0)


class TestCompareToClinical:
    """Tests for compare_to_clinical."""

    def test_pathological_row(self):
        """Test 5712 against 5785 Pa: 1.26 %, printed as 1.2 %."""
        report = compare_to_clinical(5712.0, DEFAULT_REFERENCES["pathological"])
        assert report.error_percent == 1.26
        assert report.error_percent_one_decimal == 1.2
        assert report.note is None

    def test_physiological_row(self):
        """Test 7070 against 6962 Pa: 1.55 %, which differs from the printed 1.3 %."""
        report = compare_to_clinical(7070.0, DEFAULT_REFERENCES["physiological"])
        assert report.error_percent == 1.55
        assert report.error_percent_one_decimal == 1.5
        assert report.published_error_percent == 1.3
        assert report.note is not None
        assert "1.55" in report.note

    def test_no_published_value(self):
        """Test references without a printed error never get a note."""
        ref = ClinicalReference(condition="pathological", real_pressure=5785.0)
        report = compare_to_clinical(5000.0, ref)
        assert report.note is None
        assert report.error_percent == pytest.approx(13.57, abs=0.01)


def test_format_comparison():
    """Test the table lists each condition and its note."""
    reports = [
        compare_to_clinical(7070.0, DEFAULT_REFERENCES["physiological"]),
        compare_to_clinical(5712.0, DEFAULT_REFERENCES["pathological"]),
    ]
    text = format_comparison(reports)
    assert "physiological" in text
    assert "pathological" in text
    assert "1.26" in text
    assert "note (physiological)" in text
    assert "note (pathological)" not in text
