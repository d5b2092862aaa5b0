"""Axisymmetric compressible Eulerian solver for the urine/void mixture.

Finite volumes on the uniform r-z grid with a porosity (open-fraction)
representation of the moving walls. Each cell holds mass, momentum and total
energy in its open volume φV; faces pass flux through the aperture
min(φL, φR). Faces between two liquid cells use the Rusanov flux. Faces
touching a void or partly filled cell use donor-cell transport so the free
surface is not smeared at the sound speed. The momentum pressure term is
written as (F - p_cell) per face, which keeps any uniform pressure at rest
exactly, including the 1/r hoop source of the axisymmetric equations.

Each step is a z sweep followed by an r sweep. Transport out of a cell is
limited so that a sweep never takes more mass than the cell holds, and cells
below ALPHA_VOID carry no momentum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from uro_fsi.config import PolynomialEOS
from uro_fsi.errors import FluidSolverError
from uro_fsi.materials import eos_pressure, sound_speed
from uro_fsi.mesh.fluid import COVERED, FLUID, VOID, EulerGrid, FluidState

logger = logging.getLogger(__name__)

ALPHA_VOID = 1e-3  # below this urine fraction a cell is void
ALPHA_LIQUID = 0.99  # both sides above this use the Rusanov flux
COVER_THRESHOLD = 0.05  # open fraction below which a cell is covered by solid
OUTFLOW_MARGIN = 1e-9  # share of its mass a drained cell keeps


@dataclass
class FluidPrimitives:
    """Cell-wise derived quantities of a FluidState."""

    rho: NDArray[np.float64]
    vr: NDArray[np.float64]
    vz: NDArray[np.float64]
    e: NDArray[np.float64]
    alpha: NDArray[np.float64]  # urine volume fraction ρ/ρ0
    p: NDArray[np.float64]
    c: NDArray[np.float64]
    open_fraction: NDArray[np.float64]  # φ with covered cells closed

    @property
    def liquid(self) -> NDArray[np.bool_]:
        return self.alpha >= ALPHA_VOID


def open_fraction(phi: NDArray[np.float64], cover_threshold: float = COVER_THRESHOLD) -> NDArray[np.float64]:
    """Open fraction with cells under the cover threshold closed."""
    return np.where(phi >= cover_threshold, phi, 0.0)


def primitives(
    grid: EulerGrid,
    state: FluidState,
    eos: PolynomialEOS,
    cover_threshold: float = COVER_THRESHOLD,
) -> FluidPrimitives:
    """Density, velocity, energy, pressure and sound speed per cell.

    Void and partly filled cells cannot fall below the datum pressure p_ref;
    cells below ALPHA_VOID carry exactly p_ref.
    """
    open_frac = open_fraction(state.phi, cover_threshold)
    v_open = open_frac * grid.volume
    has_volume = v_open > 0.0
    rho = np.divide(state.mass, v_open, out=np.zeros(grid.shape), where=has_volume)
    has_mass = state.mass > 0.0
    vr = np.divide(state.mom_r, state.mass, out=np.zeros(grid.shape), where=has_mass)
    vz = np.divide(state.mom_z, state.mass, out=np.zeros(grid.shape), where=has_mass)
    specific = np.divide(state.energy, state.mass, out=np.zeros(grid.shape), where=has_mass)
    e = np.maximum(specific - 0.5 * (vr * vr + vz * vz), 0.0)

    alpha = rho / eos.rho0
    liquid = alpha >= ALPHA_VOID
    mu = np.where(liquid, alpha - 1.0, 0.0)
    p = np.full(grid.shape, state.p_ref)
    if np.any(liquid):
        p[liquid] = np.maximum(eos_pressure(mu[liquid], e[liquid], eos), state.p_ref)
    c = np.where(liquid, sound_speed(eos, mu), 0.0)
    return FluidPrimitives(rho=rho, vr=vr, vz=vz, e=e, alpha=alpha, p=p, c=c, open_fraction=open_frac)


def cell_pressure(grid: EulerGrid, state: FluidState, eos: PolynomialEOS) -> NDArray[np.float64]:
    """Absolute pressure per cell in Pa."""
    return primitives(grid, state, eos).p


def _face_flux(
    rho_l: NDArray[np.float64],
    vn_l: NDArray[np.float64],
    vt_l: NDArray[np.float64],
    p_l: NDArray[np.float64],
    en_l: NDArray[np.float64],
    c_l: NDArray[np.float64],
    liq_l: NDArray[np.bool_],
    rho_r: NDArray[np.float64],
    vn_r: NDArray[np.float64],
    vt_r: NDArray[np.float64],
    p_r: NDArray[np.float64],
    en_r: NDArray[np.float64],
    c_r: NDArray[np.float64],
    liq_r: NDArray[np.bool_],
) -> tuple[NDArray[np.float64], ...]:
    """Transport flux per unit area: (mass, normal momentum, tangential momentum, energy).

    The normal momentum excludes the face pressure 0.5(pL + pR), which the
    caller applies separately.
    """
    # Rusanov
    s = np.maximum(np.abs(vn_l) + c_l, np.abs(vn_r) + c_r)
    ml, mr = rho_l * vn_l, rho_r * vn_r
    f_mass = 0.5 * (ml + mr) - 0.5 * s * (rho_r - rho_l)
    f_n = 0.5 * (ml * vn_l + mr * vn_r) - 0.5 * s * (mr - ml)
    f_t = 0.5 * (ml * vt_l + mr * vt_r) - 0.5 * s * (rho_r * vt_r - rho_l * vt_l)
    f_e = 0.5 * ((en_l + p_l) * vn_l + (en_r + p_r) * vn_r) - 0.5 * s * (en_r - en_l)

    # Donor cell at free surfaces
    rho_sum = rho_l + rho_r
    v_f = np.divide(ml + mr, rho_sum, out=np.zeros_like(rho_sum), where=rho_sum > 0.0)
    from_left = v_f > 0.0
    rho_d = np.where(from_left, rho_l, rho_r)
    vn_d = np.where(from_left, vn_l, vn_r)
    vt_d = np.where(from_left, vt_l, vt_r)
    en_d = np.where(from_left, en_l, en_r)
    p_f = 0.5 * (p_l + p_r)
    d_mass = rho_d * v_f
    d_n = d_mass * vn_d
    d_t = d_mass * vt_d
    d_e = (en_d + p_f) * v_f

    rusanov = liq_l & liq_r
    return (
        np.where(rusanov, f_mass, d_mass),
        np.where(rusanov, f_n, d_n),
        np.where(rusanov, f_t, d_t),
        np.where(rusanov, f_e, d_e),
    )


def _with_ghosts(values: NDArray[np.float64], axis: int, negate: bool = False) -> tuple[
    NDArray[np.float64], NDArray[np.float64]
]:
    """Left/right states of every face along an axis, mirroring at both ends."""
    sign = -1.0 if negate else 1.0
    if axis == 0:
        first, last = values[:1], values[-1:]
    else:
        first, last = values[:, :1], values[:, -1:]
    left = np.concatenate([sign * first, values], axis=axis)
    right = np.concatenate([values, sign * last], axis=axis)
    return left, right


def _mirror_bool(values: NDArray[np.bool_], axis: int) -> tuple[NDArray[np.bool_], NDArray[np.bool_]]:
    if axis == 0:
        first, last = values[:1], values[-1:]
    else:
        first, last = values[:, :1], values[:, -1:]
    return np.concatenate([first, values], axis=axis), np.concatenate([values, last], axis=axis)


def _diff(face: NDArray[np.float64], axis: int) -> NDArray[np.float64]:
    """Net inflow into each cell from face quantities (left face minus right face)."""
    if axis == 0:
        return face[:-1] - face[1:]
    return face[:, :-1] - face[:, 1:]


def _apertures(grid: EulerGrid, open_frac: NDArray[np.float64], axis: int) -> NDArray[np.float64]:
    """Open face areas min(φL, φR)·A along one axis, boundary faces mirrored."""
    phi_l, phi_r = _with_ghosts(open_frac, axis)
    if axis == 0:
        return np.minimum(phi_l, phi_r) * grid.area_r[:, None]
    return np.minimum(phi_l, phi_r) * grid.area_z[:, None]


@dataclass
class FaceFluxes:
    """Aperture-weighted fluxes through the faces normal to one axis, per second."""

    mass: NDArray[np.float64]
    normal: NDArray[np.float64]  # normal momentum transport, pressure excluded
    tangential: NDArray[np.float64]
    energy: NDArray[np.float64]
    pressure: NDArray[np.float64]  # aperture × face pressure
    aperture: NDArray[np.float64]

    def scaled(self, factor: NDArray[np.float64]) -> FaceFluxes:
        """Transport scaled face by face; the pressure force is kept."""
        return replace(
            self,
            mass=self.mass * factor,
            normal=self.normal * factor,
            tangential=self.tangential * factor,
            energy=self.energy * factor,
        )


def face_fluxes(
    grid: EulerGrid,
    prim: FluidPrimitives,
    energy_density: NDArray[np.float64],
    axis: int,
) -> FaceFluxes:
    """Fluxes through every face normal to ``axis`` (0 = r, 1 = z)."""
    vn, vt = (prim.vr, prim.vz) if axis == 0 else (prim.vz, prim.vr)
    liq = prim.alpha >= ALPHA_LIQUID

    rho_l, rho_r = _with_ghosts(prim.rho, axis)
    vn_l, vn_r = _with_ghosts(vn, axis, negate=True)
    vt_l, vt_r = _with_ghosts(vt, axis)
    p_l, p_r = _with_ghosts(prim.p, axis)
    en_l, en_r = _with_ghosts(energy_density, axis)
    c_l, c_r = _with_ghosts(prim.c, axis)
    liq_l, liq_r = _mirror_bool(liq, axis)

    f_mass, f_n, f_t, f_e = _face_flux(
        rho_l, vn_l, vt_l, p_l, en_l, c_l, liq_l, rho_r, vn_r, vt_r, p_r, en_r, c_r, liq_r
    )
    aperture = _apertures(grid, prim.open_fraction, axis)
    return FaceFluxes(
        mass=aperture * f_mass,
        normal=aperture * f_n,
        tangential=aperture * f_t,
        energy=aperture * f_e,
        pressure=aperture * 0.5 * (p_l + p_r),
        aperture=aperture,
    )


def outflow_factor(
    mass: NDArray[np.float64],
    flux: NDArray[np.float64],
    dt: float,
    axis: int,
) -> NDArray[np.float64]:
    """Per-face scale factors that keep every cell's outflow within its mass.

    A cell whose outflow over dt exceeds (1 - OUTFLOW_MARGIN) of its mass has
    both its outgoing faces scaled down by the same factor. Each face takes
    the factor of the cell it drains, so the update stays conservative.

    Args:
        mass: Cell masses (nr, nz), kg.
        flux: Mass fluxes through the faces normal to ``axis``, kg/s, positive
            towards increasing index.
        dt: Time step in s.
        axis: 0 for r faces (nr + 1, nz), 1 for z faces (nr, nz + 1).

    Returns:
        Factors in [0, 1] shaped like ``flux``.
    """
    if axis == 0:
        outflow = dt * (np.maximum(flux[1:], 0.0) + np.maximum(-flux[:-1], 0.0))
        ones = np.ones((1, mass.shape[1]))
    else:
        outflow = dt * (np.maximum(flux[:, 1:], 0.0) + np.maximum(-flux[:, :-1], 0.0))
        ones = np.ones((mass.shape[0], 1))
    budget = (1.0 - OUTFLOW_MARGIN) * np.maximum(mass, 0.0)
    theta = np.divide(budget, outflow, out=np.ones_like(mass), where=outflow > budget)
    drained_left = np.concatenate([ones, theta], axis=axis)
    drained_right = np.concatenate([theta, ones], axis=axis)
    return np.where(flux > 0.0, drained_left, drained_right)


def _rates(
    faces: FaceFluxes, p: NDArray[np.float64], axis: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Rates of change (mass, normal mom, tangential mom, energy) from faces along one axis."""
    ap, g = faces.aperture, faces.pressure
    if axis == 0:
        d_n = (p * ap[1:] - g[1:]) + (g[:-1] - p * ap[:-1])
    else:
        d_n = (p * ap[:, 1:] - g[:, 1:]) + (g[:, :-1] - p * ap[:, :-1])
    return (
        _diff(faces.mass, axis),
        d_n + _diff(faces.normal, axis),
        _diff(faces.tangential, axis),
        _diff(faces.energy, axis),
    )


def wall_force(
    grid: EulerGrid,
    open_frac: NDArray[np.float64],
    gauge: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Force of the walls on the urine of each cell, N, shape (nr, nz, 2).

    The porous momentum update pushes every cell with p times the change of
    aperture across it. Along z all of that comes from the walls; along r the
    open-cell share φ(A_out - A_in) is the hoop source and the rest is the
    wall. Only the gauge pressure is applied; the datum acts on both sides of
    the wall.

    Args:
        grid: Eulerian grid.
        open_frac: Open fraction with covered cells closed (see open_fraction).
        gauge: Pressure above the datum per cell, Pa.
    """
    ap_r = _apertures(grid, open_frac, 0)
    ap_z = _apertures(grid, open_frac, 1)
    hoop = open_frac * np.diff(grid.area_r)[:, None]
    geom_r = ap_r[1:] - ap_r[:-1] - hoop
    geom_z = ap_z[:, 1:] - ap_z[:, :-1]
    return np.stack([gauge * geom_r, gauge * geom_z], axis=-1)


def _relocate_stranded(
    grid: EulerGrid,
    mass: NDArray[np.float64],
    fields: list[NDArray[np.float64]],
    phi: NDArray[np.float64],
    cover_threshold: float,
) -> int:
    """Move the contents of covered cells to their most open neighbour, in place."""
    stranded = (phi < cover_threshold) & (mass > 0.0)
    if not np.any(stranded):
        return 0
    src_i, src_j = np.nonzero(stranded)
    offsets = np.array([[-1, 0], [1, 0], [0, -1], [0, 1]])
    cand_i = src_i[:, None] + offsets[None, :, 0]
    cand_j = src_j[:, None] + offsets[None, :, 1]
    inside = (cand_i >= 0) & (cand_i < grid.nr) & (cand_j >= 0) & (cand_j < grid.nz)
    cand_phi = np.where(
        inside, phi[np.clip(cand_i, 0, grid.nr - 1), np.clip(cand_j, 0, grid.nz - 1)], -1.0
    )
    best = np.argmax(cand_phi, axis=1)
    dst_i = cand_i[np.arange(len(best)), best]
    dst_j = cand_j[np.arange(len(best)), best]
    for arr in [mass, *fields]:
        moved = arr[src_i, src_j].copy()
        arr[src_i, src_j] = 0.0
        np.add.at(arr, (dst_i, dst_j), moved)
    return len(src_i)


def update_status(
    grid: EulerGrid,
    state: FluidState,
    eos: PolynomialEOS,
    cover_threshold: float = COVER_THRESHOLD,
) -> None:
    """Recompute fluid/void/covered flags in place."""
    v_open = state.phi * grid.volume
    alpha = np.divide(
        state.mass, eos.rho0 * v_open, out=np.zeros(grid.shape), where=v_open > 0.0
    )
    status = np.full(grid.shape, VOID, dtype=np.int8)
    status[alpha >= ALPHA_VOID] = FLUID
    status[state.phi < cover_threshold] = COVERED
    state.status = status


def settle_void(state: FluidState) -> int:
    """Drop momentum and kinetic energy of void cells, in place.

    Returns:
        Number of void cells that were moving.
    """
    moving = (state.status == VOID) & ((state.mom_r != 0.0) | (state.mom_z != 0.0))
    if not np.any(moving):
        return 0
    m = state.mass[moving]
    kinetic = np.divide(
        0.5 * (state.mom_r[moving] ** 2 + state.mom_z[moving] ** 2),
        m,
        out=np.zeros_like(m),
        where=m > 0.0,
    )
    state.energy[moving] = np.maximum(state.energy[moving] - kinetic, 0.0)
    state.mom_r[moving] = 0.0
    state.mom_z[moving] = 0.0
    return int(np.count_nonzero(moving))


def _sweep(
    grid: EulerGrid,
    state: FluidState,
    prim: FluidPrimitives,
    dt: float,
    axis: int,
) -> FluidState:
    """One-dimensional update of ``state`` along r (axis 0) or z (axis 1)."""
    v_open = prim.open_fraction * grid.volume
    energy_density = np.divide(
        state.energy, v_open, out=np.zeros(grid.shape), where=v_open > 0.0
    )
    faces = face_fluxes(grid, prim, energy_density, axis)
    factor = outflow_factor(state.mass, faces.mass, dt, axis)
    d_mass, d_normal, d_tangential, d_energy = _rates(faces.scaled(factor), prim.p, axis)

    new = state.copy()
    new.mass = state.mass + dt * d_mass
    if axis == 0:
        new.mom_r = state.mom_r + dt * d_normal
        new.mom_z = state.mom_z + dt * d_tangential
    else:
        new.mom_z = state.mom_z + dt * d_normal
        new.mom_r = state.mom_r + dt * d_tangential
    new.energy = state.energy + dt * d_energy

    bad = (new.mass < 0.0) | ~np.isfinite(new.mass) | ~np.isfinite(new.energy)
    if np.any(bad):
        cell = int(np.flatnonzero(bad)[0])
        i, j = np.unravel_index(cell, grid.shape)
        raise FluidSolverError(
            f"Mass {new.mass.flat[cell]:.3e} kg, energy {new.energy.flat[cell]:.3e} J "
            f"in cell ({i}, {j}) after a step of {dt:.3e} s",
            cell_id=cell,
        )
    return new


def fluid_step(
    grid: EulerGrid,
    state: FluidState,
    dt: float,
    eos: PolynomialEOS,
    phi_new: NDArray[np.float64] | None = None,
    cover_threshold: float = COVER_THRESHOLD,
    prim: FluidPrimitives | None = None,
) -> FluidState:
    """Advance the fluid by one explicit step.

    The step is split into a z sweep on the current state followed by an r
    sweep, so each sweep is stable up to a Courant number of one. Wall motion
    enters through the open fraction: fluxes use the apertures of the current
    state, then the open fraction is replaced by ``phi_new`` and the p dV work
    of the change is added to the energy of cells holding urine.

    Args:
        grid: Eulerian grid.
        state: Current state (left untouched).
        dt: Time step in s, at most fluid_stable_dt.
        eos: Urine equation of state.
        phi_new: Open fraction after the wall moved; unchanged when omitted.
        cover_threshold: Open fraction below which a cell is closed.
        prim: Primitives of ``state`` when already computed.

    Returns:
        The updated FluidState.

    Raises:
        FluidSolverError: If a cell ends with negative or non-finite mass or energy.
    """
    if prim is None:
        prim = primitives(grid, state, eos, cover_threshold)
    half = _sweep(grid, state, prim, dt, axis=1)
    new = _sweep(grid, half, primitives(grid, half, eos, cover_threshold), dt, axis=0)

    if phi_new is not None:
        work_cells = prim.liquid & (state.mass > 0.0)
        new.energy = new.energy - np.where(
            work_cells, prim.p * (phi_new - state.phi) * grid.volume, 0.0
        )
        new.phi = np.array(phi_new, dtype=float, copy=True)

    moved = _relocate_stranded(grid, new.mass, [new.mom_r, new.mom_z, new.energy], new.phi, cover_threshold)
    if moved:
        logger.debug(f"Relocated urine from {moved} newly covered cells")

    update_status(grid, new, eos, cover_threshold)
    settle_void(new)
    return new


def fluid_stable_dt(
    grid: EulerGrid,
    state: FluidState,
    eos: PolynomialEOS,
    prim: FluidPrimitives | None = None,
) -> float:
    """Smallest h / (|u| + c) over open cells holding any mass; +inf when none moves."""
    if prim is None:
        prim = primitives(grid, state, eos)
    active = (state.mass > 0.0) & (prim.open_fraction > 0.0)
    if not np.any(active):
        return float("inf")
    speed = float(np.max(np.hypot(prim.vr[active], prim.vz[active]) + prim.c[active]))
    if speed <= 0.0:
        return float("inf")
    return float(grid.h / speed)


def urethral_mass(grid: EulerGrid, state: FluidState) -> float:
    """Urine mass currently inside the urethral lumen, kg."""
    return float(state.mass[grid.urethra_mask].sum())


__all__ = [
    "ALPHA_LIQUID",
    "ALPHA_VOID",
    "COVERED",
    "COVER_THRESHOLD",
    "FLUID",
    "OUTFLOW_MARGIN",
    "VOID",
    "FaceFluxes",
    "FluidPrimitives",
    "cell_pressure",
    "face_fluxes",
    "fluid_stable_dt",
    "fluid_step",
    "open_fraction",
    "outflow_factor",
    "primitives",
    "settle_void",
    "update_status",
    "urethral_mass",
    "wall_force",
]
