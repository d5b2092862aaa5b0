"""Uniform axisymmetric Eulerian grid and the initial urine fill.

Cells are indexed [i, j] with i along r (starting at the axis) and j along z.
All quantities are SI.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from uro_fsi.config import ScenarioConfig
from uro_fsi.errors import ConfigurationError
from uro_fsi.materials import initial_compression
from uro_fsi.mesh.profile import AxisymProfile
from uro_fsi.mesh.solid import LagrangianMesh, mesh_solid
from uro_fsi.utils import MM, cap_volume

logger = logging.getLogger(__name__)

# Cell status codes
FLUID, VOID, COVERED = 0, 1, 2
STATUS_NAMES: tuple[str, ...] = ("fluid", "void", "covered")


@dataclass(frozen=True, eq=False)
class EulerGrid:
    """Uniform r-z grid starting at the symmetry axis."""

    nr: int
    nz: int
    dr: float
    dz: float
    z0: float  # lower edge of the first cell row
    urethra_mask: NDArray[np.bool_] = field(repr=False)  # urethral lumen cells (reference)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nr, self.nz)

    @property
    def h(self) -> float:
        return min(self.dr, self.dz)

    @property
    def r_faces(self) -> NDArray[np.float64]:
        return np.arange(self.nr + 1) * self.dr

    @property
    def z_faces(self) -> NDArray[np.float64]:
        return self.z0 + np.arange(self.nz + 1) * self.dz

    @property
    def r_centres(self) -> NDArray[np.float64]:
        return (np.arange(self.nr) + 0.5) * self.dr

    @property
    def z_centres(self) -> NDArray[np.float64]:
        return self.z0 + (np.arange(self.nz) + 0.5) * self.dz

    @property
    def volume(self) -> NDArray[np.float64]:
        """Ring volume 2π r_c Δr Δz, shape (nr, nz)."""
        ring = 2.0 * math.pi * self.r_centres * self.dr * self.dz
        return np.broadcast_to(ring[:, None], self.shape)

    @property
    def area_r(self) -> NDArray[np.float64]:
        """Radial face areas 2π r_f Δz, shape (nr + 1,)."""
        return 2.0 * math.pi * self.r_faces * self.dz

    @property
    def area_z(self) -> NDArray[np.float64]:
        """Axial face areas 2π r_c Δr, shape (nr,)."""
        return 2.0 * math.pi * self.r_centres * self.dr

    def centres(self) -> NDArray[np.float64]:
        """Cell centres as an (nr * nz, 2) array in C order."""
        rr, zz = np.meshgrid(self.r_centres, self.z_centres, indexing="ij")
        return np.column_stack([rr.ravel(), zz.ravel()])

    def locate(self, r: float, z: float) -> tuple[int, int] | None:
        """Index of the cell containing (r, z), or None outside the grid."""
        i = math.floor(r / self.dr)
        j = math.floor((z - self.z0) / self.dz)
        if 0 <= i < self.nr and 0 <= j < self.nz:
            return i, j
        return None


@dataclass
class FluidState:
    """Conservative cell state of the urine/void mixture."""

    mass: NDArray[np.float64]  # kg
    mom_r: NDArray[np.float64]  # kg m/s
    mom_z: NDArray[np.float64]
    energy: NDArray[np.float64]  # total energy m(e + v²/2), J
    phi: NDArray[np.float64]  # open (non-solid) fraction of each cell
    status: NDArray[np.int8]
    p_ref: float = 0.0  # datum pressure carried by void cells, Pa

    def copy(self) -> FluidState:
        return replace(
            self,
            mass=self.mass.copy(),
            mom_r=self.mom_r.copy(),
            mom_z=self.mom_z.copy(),
            energy=self.energy.copy(),
            phi=self.phi.copy(),
            status=self.status.copy(),
        )

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    @property
    def total_energy(self) -> float:
        return float(self.energy.sum())

    def status_counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.status == code)) for code, name in enumerate(STATUS_NAMES)}


def build_grid(
    mesh: LagrangianMesh, profile: AxisymProfile, cell_size: float, margin: float
) -> EulerGrid:
    """Uniform grid enclosing the solid bounding box plus a relative margin.

    Args:
        mesh: Solid mesh (metres).
        profile: Profile, used for the urethral lumen mask.
        cell_size: Cell edge length in metres.
        margin: Fraction of the bounding-box extent added on each open side.
    """
    r_max = float(mesh.nodes[:, 0].max())
    z_min = float(mesh.nodes[:, 1].min())
    z_max = float(mesh.nodes[:, 1].max())
    height = z_max - z_min

    nr = math.ceil(r_max * (1.0 + margin) / cell_size)
    z_lo = z_min - margin * height
    nz = math.ceil((z_max + margin * height - z_lo) / cell_size)

    rc = (np.arange(nr) + 0.5) * cell_size
    zc = z_lo + (np.arange(nz) + 0.5) * cell_size
    a_u = profile.urethra_inner_radius * MM
    tube_top = profile.tube_top_z * MM
    tube_bottom = profile.tube_bottom_z * MM
    urethra = (rc[:, None] < a_u) & (zc[None, :] < tube_top) & (zc[None, :] >= tube_bottom)

    return EulerGrid(nr=nr, nz=nz, dr=cell_size, dz=cell_size, z0=z_lo, urethra_mask=urethra)


def fill_level(radius: float, fill_fraction: float) -> float:
    """Height of the flat urine surface in a centred sphere.

    Args:
        radius: Sphere radius (any length unit).
        fill_fraction: Filled share of the sphere volume, in (0, 1].

    Returns:
        Plane height relative to the centre, in the radius unit; +inf when full.
    """
    if fill_fraction >= 1.0:
        return math.inf
    target = fill_fraction * cap_volume(radius, radius)
    return brentq(lambda z: cap_volume(radius, z) - target, -radius, radius, xtol=1e-12 * radius)


def mesh_fluid(
    config: ScenarioConfig,
    profile: AxisymProfile,
    mesh: LagrangianMesh | None = None,
) -> tuple[EulerGrid, FluidState]:
    """Build the Eulerian grid and fill the bladder with urine.

    Urine fills the bladder lumen below a flat plane holding fill_fraction of
    the capacity. It starts at rest, e = 0, compressed by μ0 = p0/A1 so that
    its pressure equals the initial vesical pressure, which also becomes the
    datum of the void.

    Args:
        config: Scenario.
        profile: Geometry of the scenario.
        mesh: Solid mesh; built from the profile when omitted.

    Returns:
        (grid, initial fluid state).

    Raises:
        ConfigurationError: If the fluid cells are coarser than the bladder wall.
    """
    if config.mesh.fluid_cell_size > config.bladder_wall_thickness:
        raise ConfigurationError(
            f"Fluid cell size {config.mesh.fluid_cell_size} mm exceeds the wall thickness "
            f"{config.bladder_wall_thickness} mm; the coupling cannot resolve the wall"
        )
    # Local import: the coupling module depends on the grid types defined here
    from uro_fsi.solvers.coupling import classify_cells, wetted_surface

    if mesh is None:
        mesh = mesh_solid(profile, config.mesh)
    grid = build_grid(mesh, profile, config.mesh.fluid_cell_size * MM, config.mesh.domain_margin)

    surface = wetted_surface(mesh, mesh.nodes)
    classification = classify_cells(grid, surface)
    phi = classification.phi

    z_fill = fill_level(profile.bladder_radius * MM, config.fill_fraction)
    zc = grid.z_centres
    below = np.clip((z_fill - (zc - 0.5 * grid.dz)) / grid.dz, 0.0, 1.0)
    urine = classification.lumen & ~grid.urethra_mask

    eos = config.eos
    mu0 = initial_compression(config.initial_vesical_pressure, eos)
    mass = np.where(urine, eos.rho0 * (1.0 + mu0) * phi * grid.volume * below[None, :], 0.0)
    covered = phi < classification.cover_threshold
    mass[covered] = 0.0

    status = np.full(grid.shape, VOID, dtype=np.int8)
    status[mass > 0.0] = FLUID
    status[covered] = COVERED

    state = FluidState(
        mass=mass,
        mom_r=np.zeros(grid.shape),
        mom_z=np.zeros(grid.shape),
        energy=np.zeros(grid.shape),
        phi=phi,
        status=status,
        p_ref=config.initial_vesical_pressure,
    )
    logger.info(
        f"Fluid grid: {grid.nr}x{grid.nz} cells of {config.mesh.fluid_cell_size} mm, "
        f"urine mass {state.total_mass * 1e3:.2f} g, fill plane z={z_fill / MM:.2f} mm"
    )
    return grid, state
