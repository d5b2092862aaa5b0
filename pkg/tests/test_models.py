"""Tests for result and report models."""

import pytest

from uro_fsi.models import (
    DEFAULT_REFERENCES,
    OracleResult,
    ProbeSeries,
    RunReport,
    Violation,
)


class TestProbeSeries:
    """Tests for ProbeSeries."""

    def test_append_and_peak(self):
        """Test samples accumulate and the peak is found."""
        series = ProbeSeries(point=(0.0, 0.0))
        for t, p in [(0.0, 2062.0), (1.0, 2100.0), (2.0, 2080.0)]:
            series.append(t, p)
        assert len(series) == 3
        assert series.peak() == (1.0, 2100.0)
        assert series.stale == [False, False, False]

    def test_times_strictly_increase(self):
        """Test a repeated time is rejected."""
        series = ProbeSeries(point=(0.0, 0.0))
        series.append(1.0, 0.0)
        with pytest.raises(ValueError):
            series.append(1.0, 0.0)

    def test_empty_peak(self):
        """Test the peak of an empty series raises."""
        with pytest.raises(ValueError):
            ProbeSeries(point=(0.0, 0.0)).peak()


class TestRunReport:
    """Tests for RunReport."""

    def test_max_energy_error(self):
        """Test the largest audited error is reported."""
        report = RunReport(condition="physiological", energy_error_history=[0.0, 0.02, 0.01])
        assert report.max_energy_error == 0.02
        assert RunReport(condition="pathological").max_energy_error == 0.0

    def test_json_round_trip(self):
        """Test a report survives JSON serialisation."""
        report = RunReport(condition="pathological", peak_pressure=5712.0, steps=10)
        assert RunReport.model_validate_json(report.model_dump_json()) == report


class TestReferences:
    """Tests for the clinical references."""

    def test_values(self):
        """Test the measured cough peaks."""
        assert DEFAULT_REFERENCES["physiological"].real_pressure == 6962.0
        assert DEFAULT_REFERENCES["pathological"].real_pressure == 5785.0


class TestOracleResult:
    """Tests for OracleResult.from_values."""

    def test_pass(self):
        """Test an error within tolerance passes."""
        result = OracleResult.from_values("x", 101.0, 100.0, 0.02)
        assert result.relative_error == pytest.approx(0.01)
        assert result.passed

    def test_fail(self):
        """Test an error beyond tolerance fails."""
        assert not OracleResult.from_values("x", 110.0, 100.0, 0.02).passed

    def test_zero_reference(self):
        """Test a zero reference uses the absolute error."""
        result = OracleResult.from_values("x", 1e-9, 0.0, 1e-6)
        assert result.relative_error == pytest.approx(1e-9)
        assert result.passed


def test_violation_str():
    """Test violations print as field: rule."""
    assert str(Violation(field="fill_fraction", rule="must lie in (0, 1]")) == (
        "fill_fraction: must lie in (0, 1]"
    )
