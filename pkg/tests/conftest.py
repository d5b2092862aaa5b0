"""Shared test fixtures for uro-fsi tests."""

from __future__ import annotations

import numpy as np
import pytest

from uro_fsi.config import MeshSettings, ScenarioConfig
from uro_fsi.mesh.fluid import FLUID, EulerGrid, FluidState
from uro_fsi.mesh.solid import BLADDER, LagrangianMesh, exterior_facets, mesh_spherical_shell
from uro_fsi.scenario import preset
from uro_fsi.utils import MM


def quad_mesh(quads: list[list[tuple[float, float]]], material: int = BLADDER) -> LagrangianMesh:
    """Mesh of loose counter-clockwise quads given in mm, no shared nodes."""
    nodes = np.array([pt for quad in quads for pt in quad], dtype=float) * MM
    elements = np.arange(4 * len(quads), dtype=np.int64).reshape(-1, 4)
    facets = exterior_facets(elements, nodes)
    return LagrangianMesh(
        nodes=nodes,
        elements=elements,
        material=np.full(len(quads), material, dtype=np.int64),
        facet_sets={"outer": facets},
        fixed_nodes=np.zeros(0, dtype=np.int64),
        axis_nodes=np.zeros(0, dtype=np.int64),
        lumen_nodes=np.zeros(0, dtype=np.int64),
        outlines={f"quad{k}": elements[k] for k in range(len(quads))},
        through_thickness=1,
        strip_shape=(len(quads), 1),
    )


def uniform_state(grid: EulerGrid, density: float, p_ref: float = 0.0) -> FluidState:
    """Grid fully open and filled with urine at rest."""
    return FluidState(
        mass=np.full(grid.shape, density) * grid.volume,
        mom_r=np.zeros(grid.shape),
        mom_z=np.zeros(grid.shape),
        energy=np.zeros(grid.shape),
        phi=np.ones(grid.shape),
        status=np.full(grid.shape, FLUID, dtype=np.int8),
        p_ref=p_ref,
    )


# ============================================================================
# Scenario Fixtures
# ============================================================================


@pytest.fixture
def physiological() -> ScenarioConfig:
    """Supported 410 cm³ preset."""
    return preset("physiological")


@pytest.fixture
def pathological() -> ScenarioConfig:
    """Unsupported 346 cm³ preset."""
    return preset("pathological")


@pytest.fixture
def coarse_pathological() -> ScenarioConfig:
    """Pathological preset on a coarse mesh, no pulse, fine output cadence."""
    config = preset(
        "pathological",
        MeshSettings(target_solid_element_size=3.0, fluid_cell_size=1.5, domain_margin=0.1),
    )
    pulse = config.pulse.model_copy(update={"peak_pressure": 0.0})
    solver = config.solver.model_copy(update={"output_interval": 0.005})
    return config.model_copy(update={"pulse": pulse, "solver": solver})


# ============================================================================
# Mesh Fixtures
# ============================================================================


@pytest.fixture
def unit_quad() -> LagrangianMesh:
    """One 1 mm square element centred at r = 10 mm."""
    return quad_mesh([[(9.5, 0.0), (10.5, 0.0), (10.5, 1.0), (9.5, 1.0)]])


@pytest.fixture
def shell() -> LagrangianMesh:
    """Thick bladder shell, a = 43.5 mm, b = 45 mm."""
    return mesh_spherical_shell(43.5, 45.0, n_meridian=96, n_thickness=2)


@pytest.fixture
def shell_grid() -> EulerGrid:
    """1 mm grid covering the shell fixture."""
    nr, nz = 50, 100
    return EulerGrid(
        nr=nr, nz=nz, dr=1e-3, dz=1e-3, z0=-50e-3, urethra_mask=np.zeros((nr, nz), dtype=bool)
    )


@pytest.fixture
def small_grid() -> EulerGrid:
    """8 x 12 grid of 1 mm cells starting at z = -6 mm."""
    nr, nz = 8, 12
    return EulerGrid(
        nr=nr, nz=nz, dr=1e-3, dz=1e-3, z0=-6e-3, urethra_mask=np.zeros((nr, nz), dtype=bool)
    )


# ============================================================================
# Factories
# ============================================================================


@pytest.fixture
def make_quad_mesh():
    """Factory building a mesh of loose quads given in mm."""
    return quad_mesh


@pytest.fixture
def make_uniform_state():
    """Factory filling a grid with urine at rest."""
    return uniform_state
