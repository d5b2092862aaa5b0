"""Coupled explicit time loop.

Each step takes dt = cfl_safety × min(solid, fluid) stable step, loads the
structure with the abdominal pulse, the fluid gauge pressure and contact,
advances the solid by central difference, re-classifies the Euler cells
against the moved wall and advances the fluid. The energy balance is
audited before every step; probe samples and diagnostics are taken on a
fixed output cadence.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from uro_fsi.config import PolynomialEOS, PulseSpec, ScenarioConfig
from uro_fsi.errors import FluidSolverError, SimulationAborted
from uro_fsi.export.clinical import compare_to_clinical
from uro_fsi.mesh.fluid import FLUID, EulerGrid, FluidState, mesh_fluid
from uro_fsi.mesh.profile import build_profile
from uro_fsi.mesh.solid import BLADDER, LagrangianMesh, mesh_solid
from uro_fsi.models import DEFAULT_REFERENCES, ProbeSeries, RunReport
from uro_fsi.scenario import require_valid
from uro_fsi.solvers.coupling import (
    classify_cells,
    contact_surface,
    datum_power,
    fluid_load_on_structure,
    penalty_contact,
    wetted_surface,
)
from uro_fsi.solvers.fluid import (
    COVER_THRESHOLD,
    fluid_stable_dt,
    fluid_step,
    primitives,
    urethral_mass,
)
from uro_fsi.solvers.solid import (
    SolidState,
    apply_traction,
    central_difference_step,
    internal_forces,
    kinetic_energy,
    prepare,
    solid_stable_dt,
    strain_energy,
)
from uro_fsi.utils import MM, MS, m_to_mm, s_to_ms

logger = logging.getLogger(__name__)

PULSE_FACETS = "outer_top_hemisphere"


def pulse_value(t: float, pulse: PulseSpec) -> float:
    """Abdominal pressure at time t.

    Args:
        t: Time in ms.
        pulse: Pulse timing and amplitude.

    Returns:
        Pressure in Pa; zero before hold_end and after end_time.
    """
    if t <= pulse.hold_end or t >= pulse.end_time:
        return 0.0
    if pulse.shape == "half_sine":
        phase = (t - pulse.hold_end) / (pulse.end_time - pulse.hold_end)
        return pulse.peak_pressure * math.sin(math.pi * phase)
    if t <= pulse.peak_time:
        return pulse.peak_pressure * (t - pulse.hold_end) / (pulse.peak_time - pulse.hold_end)
    return pulse.peak_pressure * (pulse.end_time - t) / (pulse.end_time - pulse.peak_time)


def probe_pressure(
    grid: EulerGrid,
    state: FluidState,
    eos: PolynomialEOS,
    point: tuple[float, float],
    last: float | None = None,
    pressure: NDArray[np.float64] | None = None,
) -> tuple[float, bool]:
    """Bilinear interpolation of the cell-centred pressure at a point.

    Only cells holding urine take part; the remaining weights are
    renormalised. Outside the band of cell centres the nearest row or column
    is used.

    Args:
        grid: Eulerian grid.
        state: Fluid state.
        eos: Urine equation of state.
        point: (r, z) in metres.
        last: Value to repeat when no surrounding cell holds urine.
        pressure: Cell pressures, computed from the state when omitted.

    Returns:
        (pressure Pa, stale); stale is True when the last value was repeated.
    """
    p = primitives(grid, state, eos).p if pressure is None else pressure
    r, z = point

    def bracket(x: float, n: int) -> tuple[int, float]:
        if n == 1:
            return 0, 0.0
        k = min(max(math.floor(x - 0.5), 0), n - 2)
        return k, min(max(x - 0.5 - k, 0.0), 1.0)

    i, tr = bracket(r / grid.dr, grid.nr)
    j, tz = bracket((z - grid.z0) / grid.dz, grid.nz)
    ii = np.array([i, min(i + 1, grid.nr - 1), i, min(i + 1, grid.nr - 1)])
    jj = np.array([j, j, min(j + 1, grid.nz - 1), min(j + 1, grid.nz - 1)])
    w = np.array([(1 - tr) * (1 - tz), tr * (1 - tz), (1 - tr) * tz, tr * tz])

    valid = (state.status[ii, jj] == FLUID) & (state.phi[ii, jj] >= COVER_THRESHOLD)
    w = np.where(valid, w, 0.0)
    total = float(w.sum())
    if total <= 0.0:
        return (state.p_ref if last is None else last), True
    return float(np.dot(w, p[ii, jj]) / total), False


@dataclass
class EnergyRecord:
    """Energy terms of the coupled system at one instant, J."""

    time: float  # ms
    solid_kinetic: float
    solid_strain: float
    contact: float
    fluid: float
    external_work: float

    @property
    def total(self) -> float:
        return self.solid_kinetic + self.solid_strain + self.contact + self.fluid


def energy_audit(history: list[EnergyRecord], floor: float = 1e-6) -> float:
    """Relative energy error of the latest record.

    |E - W_ext - E0| / max(|W_ext|, |E0|, floor), E0 taken from the first
    record and W_ext accumulated since then.
    """
    if not history:
        return 0.0
    first, latest = history[0], history[-1]
    work = latest.external_work - first.external_work
    e0 = first.total
    return abs(latest.total - work - e0) / max(abs(work), abs(e0), floor)


@dataclass
class FieldSnapshot:
    """Solid and fluid fields at one instant."""

    label: str
    time: float  # ms
    mesh: LagrangianMesh
    grid: EulerGrid
    displacement: NDArray[np.float64]  # (N, 2) m
    velocity: NDArray[np.float64]  # (N, 2) m/s
    pressure: NDArray[np.float64]  # (nr, nz) Pa
    phi: NDArray[np.float64]
    status: NDArray[np.int8]


def _snapshot(
    label: str,
    t_ms: float,
    mesh: LagrangianMesh,
    grid: EulerGrid,
    solid: SolidState,
    fluid: FluidState,
    pressure: NDArray[np.float64],
) -> FieldSnapshot:
    return FieldSnapshot(
        label=label,
        time=t_ms,
        mesh=mesh,
        grid=grid,
        displacement=solid.u.copy(),
        velocity=solid.v.copy(),
        pressure=pressure.copy(),
        phi=fluid.phi.copy(),
        status=fluid.status.copy(),
    )


def run(
    config: ScenarioConfig,
    output_dir: str | Path | None = None,
    until: float | None = None,
) -> tuple[ProbeSeries, list[FieldSnapshot], RunReport]:
    """Simulate one scenario from rest to the solver end time.

    Args:
        config: Scenario; must validate cleanly.
        output_dir: When given, probe CSV, VTK snapshots and the JSON report
            are written there, also after an abort.
        until: Stop earlier than solver.end_time, in ms.

    Returns:
        (probe series, field snapshots, run report). Snapshots are taken at
        the start, at the pulse peak and at the end (or at the abort).

    Raises:
        ConfigurationError: If the scenario has violations.
    """
    require_valid(config)
    started = time.perf_counter()
    solver = config.solver
    eos = config.eos

    profile = build_profile(config)
    mesh = mesh_solid(profile, config.mesh)
    grid, fluid = mesh_fluid(config, profile, mesh)
    model = prepare(mesh, config.materials)
    contact = contact_surface(mesh, config.materials)
    solid = SolidState.at_rest(mesh)

    probe_point = (config.probe_point[0] * MM, config.probe_point[1] * MM)
    series = ProbeSeries(point=config.probe_point)
    report = RunReport(condition=config.condition)
    snapshots: list[FieldSnapshot] = []
    history: list[EnergyRecord] = []

    end_ms = solver.end_time if until is None else min(until, solver.end_time)
    end = end_ms * MS
    interval = solver.output_interval * MS
    n_samples = math.floor(end_ms / solver.output_interval + 1e-9)
    peak_label_time = config.pulse.peak_time if config.pulse.peak_time <= end_ms else None

    t = 0.0
    step = 0
    sample = 0
    w_ext = 0.0
    contact_energy = 0.0
    max_pen = 0.0
    last_p: float | None = None
    max_u = -1.0
    prim = primitives(grid, fluid, eos)

    logger.info(
        f"Run {config.condition}: {mesh.n_elements} solid elements, "
        f"{grid.nr * grid.nz} fluid cells, end {end_ms} ms"
    )

    def energy_now(t_ms: float, strain: float) -> EnergyRecord:
        return EnergyRecord(
            time=t_ms,
            solid_kinetic=kinetic_energy(model.mass, solid.v),
            solid_strain=strain,
            contact=contact_energy,
            fluid=fluid.total_energy,
            external_work=w_ext,
        )

    def audit(entry: EnergyRecord) -> float:
        error = energy_audit([history[0], entry] if history else [entry], solver.energy_floor)
        if error > solver.energy_error_tolerance:
            raise SimulationAborted(
                f"Energy error {error:.4f} exceeds tolerance {solver.energy_error_tolerance}",
                step=step,
                time=entry.time,
                diagnostics={"energy_error": error, **entry.__dict__},
            )
        return error

    def record(t_ms: float) -> None:
        nonlocal last_p, max_u
        p, stale = probe_pressure(grid, fluid, eos, probe_point, last_p, prim.p)
        if stale:
            logger.warning(f"Probe at {config.probe_point} mm has no urine cell at {t_ms:g} ms")
        last_p = p
        series.append(t_ms, p, stale)

        entry = energy_now(t_ms, strain_energy(model, solid.u))
        history.append(entry)
        report.energy_error_history.append(energy_audit(history, solver.energy_floor))
        report.urethral_mass_history.append(urethral_mass(grid, fluid))

        mag = np.linalg.norm(solid.u, axis=1)
        node = int(np.argmax(mag))
        if mag[node] > max_u:
            max_u = float(mag[node])
            bladder = np.unique(mesh.elements[mesh.material == BLADDER])
            low = int(bladder[np.argmin(mag[bladder])])
            ref = mesh.nodes_mm()
            report.max_displacement = m_to_mm(max_u)
            report.max_displacement_node = node
            report.max_displacement_location = (float(ref[node, 0]), float(ref[node, 1]))
            report.min_displacement = m_to_mm(float(mag[low]))
            report.min_displacement_location = (float(ref[low, 0]), float(ref[low, 1]))

        audit(entry)

    try:
        contact_energy = penalty_contact(
            contact,
            solid.positions(mesh),
            solver.contact_gap_tolerance,
            solver.penalty_stiffness_scale,
        ).energy
        record(0.0)
        snapshots.append(_snapshot("initial", 0.0, mesh, grid, solid, fluid, prim.p))
        sample = 1

        while t < end * (1.0 - 1e-12):
            if solver.max_steps is not None and step >= solver.max_steps:
                raise SimulationAborted(
                    f"Step limit {solver.max_steps} reached", step=step, time=s_to_ms(t)
                )
            positions = solid.positions(mesh)
            touch = penalty_contact(
                contact, positions, solver.contact_gap_tolerance, solver.penalty_stiffness_scale
            )
            contact_energy = touch.energy
            max_pen = max(max_pen, touch.max_penetration)
            f_int, _, strain = internal_forces(model, solid.u)
            audit(energy_now(s_to_ms(t), strain))

            dt = solver.cfl_safety * min(
                solid_stable_dt(model, positions), fluid_stable_dt(grid, fluid, eos, prim=prim)
            )
            next_out = min(sample * interval, end)
            dt = min(dt, next_out - t)

            surface = wetted_surface(mesh, positions, solid.v)
            load = fluid_load_on_structure(grid, fluid, surface, prim.p)
            f_pulse = apply_traction(mesh, PULSE_FACETS, pulse_value(s_to_ms(t), config.pulse), positions)
            force = f_pulse + load.forces + touch.forces - f_int
            new_solid = central_difference_step(
                solid, force, model.mass, dt, model.fixed, solver.mass_damping
            )

            w_ext += float(np.sum(f_pulse * (new_solid.u - solid.u)))
            moving = replace(surface, velocities=new_solid.v)
            w_ext += datum_power(moving, load, fluid.p_ref) * dt

            new_positions = new_solid.positions(mesh)
            cells = classify_cells(grid, wetted_surface(mesh, new_positions), previous=fluid)
            fluid = fluid_step(grid, fluid, dt, eos, phi_new=cells.phi, prim=prim)
            solid = new_solid
            prim = primitives(grid, fluid, eos)

            t += dt
            step += 1
            if not np.isfinite(fluid.total_energy):
                raise SimulationAborted("Non-finite fluid energy", step=step, time=s_to_ms(t))

            if t >= next_out * (1.0 - 1e-12) and sample <= n_samples:
                t_ms = sample * solver.output_interval
                t = next_out
                record(t_ms)
                if peak_label_time is not None and math.isclose(t_ms, peak_label_time):
                    snapshots.append(_snapshot("peak", t_ms, mesh, grid, solid, fluid, prim.p))
                if sample % max(1, round(10.0 / solver.output_interval)) == 0:
                    logger.info(
                        f"t={t_ms:g} ms step {step}: probe {series.p[-1]:.1f} Pa, "
                        f"energy error {report.energy_error_history[-1]:.4f}"
                    )
                sample += 1

        audit(energy_now(s_to_ms(t), strain_energy(model, solid.u)))
        snapshots.append(_snapshot("final", s_to_ms(t), mesh, grid, solid, fluid, prim.p))
    except (SimulationAborted, FluidSolverError) as exc:
        logger.error(f"Run aborted at step {step}, t={s_to_ms(t):.4f} ms: {exc}")
        report.aborted = True
        report.abort_reason = str(exc)
        snapshots.append(_snapshot("abort", s_to_ms(t), mesh, grid, solid, fluid, prim.p))

    report.steps = step
    report.max_penetration = m_to_mm(max_pen)
    if len(series):
        report.peak_time, report.peak_pressure = series.peak()
        report.initial_pressure = series.p[0]
        report.comparison = compare_to_clinical(
            report.peak_pressure, DEFAULT_REFERENCES[config.condition]
        )
    report.wall_clock = time.perf_counter() - started
    logger.info(
        f"Run finished after {step} steps in {report.wall_clock:.1f} s: "
        f"peak {report.peak_pressure:.1f} Pa at {report.peak_time:g} ms"
    )

    if output_dir is not None:
        from uro_fsi.export.formats import write_run_outputs

        write_run_outputs(output_dir, series, snapshots, report)
    return series, snapshots, report


__all__ = [
    "EnergyRecord",
    "FieldSnapshot",
    "energy_audit",
    "probe_pressure",
    "pulse_value",
    "run",
]
