"""Tests for the coupled time loop and its helpers."""

import numpy as np
import pytest

from uro_fsi.config import PolynomialEOS, PulseSpec
from uro_fsi.driver import EnergyRecord, energy_audit, probe_pressure, pulse_value, run
from uro_fsi.errors import ConfigurationError
from uro_fsi.mesh.fluid import VOID

EOS = PolynomialEOS()


def _record(total: float, work: float = 0.0) -> EnergyRecord:
    return EnergyRecord(
        time=0.0,
        solid_kinetic=total,
        solid_strain=0.0,
        contact=0.0,
        fluid=0.0,
        external_work=work,
    )


class TestPulseValue:
    """Tests for pulse_value."""

    def test_hold(self):
        """Test nothing is applied during the initial hold."""
        assert pulse_value(5.0, PulseSpec()) == 0.0
        assert pulse_value(10.0, PulseSpec()) == 0.0

    def test_triangle(self):
        """Test the linear rise to the peak and the fall back."""
        pulse = PulseSpec()
        assert pulse_value(105.0, pulse) == pytest.approx(4900.0)
        assert pulse_value(57.5, pulse) == pytest.approx(2450.0)
        assert pulse_value(152.5, pulse) == pytest.approx(2450.0)

    def test_half_sine(self):
        """Test the half-sine variant peaks at mid pulse."""
        pulse = PulseSpec(shape="half_sine")
        assert pulse_value(105.0, pulse) == pytest.approx(4900.0)
        assert 0.0 < pulse_value(30.0, pulse) < 4900.0

    def test_after_pulse(self):
        """Test the load is removed at and after the end time."""
        assert pulse_value(200.0, PulseSpec()) == 0.0
        assert pulse_value(250.0, PulseSpec()) == 0.0


class TestProbePressure:
    """Tests for probe_pressure."""

    def test_uniform(self, small_grid, make_uniform_state):
        """Test a uniform field is reproduced anywhere."""
        state = make_uniform_state(small_grid, EOS.rho0)
        pressure = np.full(small_grid.shape, 3000.0)
        p, stale = probe_pressure(small_grid, state, EOS, (2.3e-3, 0.7e-3), pressure=pressure)
        assert p == pytest.approx(3000.0)
        assert not stale

    def test_linear_field_exact(self, small_grid, make_uniform_state):
        """Test bilinear interpolation is exact for a linear field."""
        state = make_uniform_state(small_grid, EOS.rho0)
        rr, zz = np.meshgrid(small_grid.r_centres, small_grid.z_centres, indexing="ij")
        pressure = 1000.0 + 2e5 * rr - 5e4 * zz
        r, z = 2.3e-3, 0.7e-3
        p, _ = probe_pressure(small_grid, state, EOS, (r, z), pressure=pressure)
        assert p == pytest.approx(1000.0 + 2e5 * r - 5e4 * z, rel=1e-12)

    def test_cell_centre(self, small_grid, make_uniform_state):
        """Test the probe at a cell centre returns that cell."""
        state = make_uniform_state(small_grid, EOS.rho0)
        pressure = np.arange(small_grid.nr * small_grid.nz, dtype=float).reshape(small_grid.shape)
        point = (small_grid.r_centres[3], small_grid.z_centres[5])
        p, _ = probe_pressure(small_grid, state, EOS, point, pressure=pressure)
        assert p == pytest.approx(pressure[3, 5])

    def test_ignores_void_cells(self, small_grid, make_uniform_state):
        """Test cells without urine drop out of the weights."""
        state = make_uniform_state(small_grid, EOS.rho0)
        pressure = np.full(small_grid.shape, 3000.0)
        pressure[3, :] = 9999.0
        state.status[3, :] = VOID
        p, stale = probe_pressure(small_grid, state, EOS, (3.0e-3, 0.0), pressure=pressure)
        assert p == pytest.approx(3000.0)
        assert not stale

    def test_stale(self, small_grid, make_uniform_state):
        """Test the last value is repeated when no cell holds urine."""
        state = make_uniform_state(small_grid, EOS.rho0, p_ref=885.0)
        state.status[:] = VOID
        p, stale = probe_pressure(small_grid, state, EOS, (2.3e-3, 0.7e-3), last=1234.0)
        assert (p, stale) == (1234.0, True)
        p, stale = probe_pressure(small_grid, state, EOS, (2.3e-3, 0.7e-3))
        assert (p, stale) == (885.0, True)


class TestEnergyAudit:
    """Tests for energy_audit."""

    def test_empty(self):
        """Test an empty history has no error."""
        assert energy_audit([]) == 0.0

    def test_balanced(self):
        """Test energy gained equals external work."""
        assert energy_audit([_record(10.0), _record(12.0, work=2.0)]) == pytest.approx(0.0)

    def test_unbalanced(self):
        """Test a spurious gain is measured against the initial energy."""
        assert energy_audit([_record(10.0), _record(11.0)]) == pytest.approx(0.1)

    def test_floor(self):
        """Test the floor applies when energy and work are both tiny."""
        assert energy_audit([_record(0.0), _record(1e-7)], floor=1e-6) == pytest.approx(0.1)


class TestRun:
    """Tests for run, mostly on a coarse pathological scenario without pulse."""

    def test_zero_forcing(self, coarse_pathological):
        """Test the probe stays at the resting pressure."""
        series, snapshots, report = run(coarse_pathological, until=0.02)
        assert not report.aborted, report.abort_reason
        assert len(series) == 5
        assert series.t[-1] == pytest.approx(0.02)
        assert max(abs(p - 885.0) for p in series.p) < 1.0
        assert [s.label for s in snapshots] == ["initial", "final"]
        assert report.steps > 0
        assert len(report.energy_error_history) == 5
        assert report.comparison is not None

    def test_deterministic(self, coarse_pathological):
        """Test two identical runs give identical traces."""
        first, _, _ = run(coarse_pathological, until=0.01)
        second, _, _ = run(coarse_pathological, until=0.01)
        assert first.t == second.t
        assert first.p == second.p

    def test_output_files(self, coarse_pathological, tmp_path):
        """Test a run writes its trace, snapshots and report."""
        run(coarse_pathological, output_dir=tmp_path, until=0.005)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "fluid_final.vtk",
            "fluid_initial.vtk",
            "probe.csv",
            "report.json",
            "solid_final.vtk",
            "solid_initial.vtk",
        ]

    def test_step_limit(self, coarse_pathological):
        """Test reaching the step limit aborts cleanly."""
        solver = coarse_pathological.solver.model_copy(update={"max_steps": 2})
        config = coarse_pathological.model_copy(update={"solver": solver})
        series, snapshots, report = run(config, until=0.02)
        assert report.aborted
        assert report.steps == 2
        assert snapshots[-1].label == "abort"
        assert len(series) >= 1

    def test_invalid_config(self, coarse_pathological):
        """Test an invalid scenario is refused before meshing."""
        config = coarse_pathological.model_copy(update={"fill_fraction": 1.5})
        with pytest.raises(ConfigurationError):
            run(config)

    def test_oversized_step_aborts(self, coarse_pathological, monkeypatch):
        """Test steps far above the stable limit are stopped between outputs."""
        pulse = PulseSpec(hold_end=0.0, peak_time=1.0, end_time=2.0, peak_pressure=4900.0)
        solver = coarse_pathological.solver.model_copy(update={"output_interval": 1.0})
        config = coarse_pathological.model_copy(update={"pulse": pulse, "solver": solver})
        monkeypatch.setattr("uro_fsi.driver.solid_stable_dt", lambda *args, **kwargs: 1e-4)
        monkeypatch.setattr("uro_fsi.driver.fluid_stable_dt", lambda *args, **kwargs: 1e-4)
        series, snapshots, report = run(config, until=1.0)
        assert report.aborted
        assert snapshots[-1].label == "abort"
        # one output interval holds about 15 of these steps
        assert len(series) == 1
        assert report.energy_error_history == [0.0]

    @pytest.mark.slow
    def test_physiological_first_millisecond(self, physiological):
        """Test the default physiological model runs 1 ms at rest without abort."""
        series, _, report = run(physiological, until=1.0)
        assert not report.aborted, report.abort_reason
        assert series.t[-1] == pytest.approx(1.0)
        assert max(abs(p - 2062.0) for p in series.p) < 50.0
        assert max(report.energy_error_history) <= physiological.solver.energy_error_tolerance
