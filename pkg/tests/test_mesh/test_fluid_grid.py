"""Tests for the Eulerian grid and the initial fill."""

import math

import numpy as np
import pytest

from uro_fsi.config import MeshSettings
from uro_fsi.errors import ConfigurationError
from uro_fsi.materials import initial_compression
from uro_fsi.mesh.fluid import COVERED, FLUID, VOID, fill_level, mesh_fluid
from uro_fsi.mesh.profile import build_profile
from uro_fsi.solvers.fluid import urethral_mass
from uro_fsi.utils import cap_volume, sphere_volume


@pytest.fixture
def filled(coarse_pathological):
    profile = build_profile(coarse_pathological)
    grid, state = mesh_fluid(coarse_pathological, profile)
    return coarse_pathological, profile, grid, state


class TestEulerGrid:
    """Tests for EulerGrid geometry."""

    def test_faces_and_centres(self, small_grid):
        """Test face and centre coordinates."""
        assert small_grid.r_faces[0] == 0.0
        assert small_grid.r_faces[-1] == pytest.approx(8e-3)
        assert small_grid.z_centres[0] == pytest.approx(-5.5e-3)
        assert small_grid.centres().shape == (96, 2)

    def test_volumes(self, small_grid):
        """Test ring volumes add up to the cylinder."""
        total = small_grid.volume.sum()
        assert total == pytest.approx(math.pi * 8e-3**2 * 12e-3)

    def test_axis_face_has_no_area(self, small_grid):
        """Test the face on r = 0 is closed."""
        assert small_grid.area_r[0] == 0.0

    def test_locate(self, small_grid):
        """Test point location."""
        assert small_grid.locate(0.5e-3, -5.5e-3) == (0, 0)
        assert small_grid.locate(7.5e-3, 5.5e-3) == (7, 11)
        assert small_grid.locate(9e-3, 0.0) is None


class TestFillLevel:
    """Tests for fill_level."""

    def test_full(self):
        """Test a full bladder has no free surface."""
        assert fill_level(40.0, 1.0) == math.inf

    def test_half(self):
        """Test half full puts the surface through the centre."""
        assert fill_level(40.0, 0.5) == pytest.approx(0.0, abs=1e-9)

    def test_volume(self):
        """Test the cap below the plane holds the fill fraction."""
        z = fill_level(43.5, 0.9)
        assert cap_volume(43.5, z) == pytest.approx(0.9 * sphere_volume(43.5))


class TestMeshFluid:
    """Tests for mesh_fluid."""

    def test_urine_mass(self, filled):
        """Test the initial urine mass matches the filled capacity."""
        config, _, _, state = filled
        mu0 = initial_compression(config.initial_vesical_pressure, config.eos)
        expected = config.eos.rho0 * (1.0 + mu0) * config.fill_fraction * config.bladder_capacity * 1e-6
        assert state.total_mass == pytest.approx(expected, rel=0.05)

    def test_at_rest(self, filled):
        """Test urine starts without motion or internal energy."""
        _, _, _, state = filled
        assert np.all(state.mom_r == 0.0)
        assert np.all(state.mom_z == 0.0)
        assert np.all(state.energy == 0.0)

    def test_datum(self, filled):
        """Test the void carries the initial vesical pressure."""
        config, _, _, state = filled
        assert state.p_ref == config.initial_vesical_pressure

    def test_status(self, filled):
        """Test status codes follow mass and open fraction."""
        _, _, _, state = filled
        assert np.all(state.mass[state.status == FLUID] > 0.0)
        assert np.all(state.mass[state.status != FLUID] == 0.0)
        assert np.all(state.phi[state.status == COVERED] < 0.05)
        counts = state.status_counts()
        assert counts["fluid"] > 0 and counts["void"] > 0 and counts["covered"] > 0

    def test_centre_is_liquid(self, filled):
        """Test the bladder centre holds urine."""
        _, _, grid, state = filled
        i, j = grid.locate(0.5 * grid.dr, 0.0)
        assert state.status[i, j] == FLUID
        assert state.phi[i, j] == 1.0

    def test_top_is_void(self, filled):
        """Test the crown above the fill plane is empty."""
        _, profile, grid, state = filled
        i, j = grid.locate(0.5 * grid.dr, 0.9 * profile.bladder_radius * 1e-3)
        assert state.status[i, j] == VOID

    def test_urethra_starts_empty(self, filled):
        """Test the urethral lumen holds no urine."""
        _, _, grid, state = filled
        assert np.any(grid.urethra_mask)
        assert urethral_mass(grid, state) == 0.0

    def test_grid_encloses_solid(self, filled):
        """Test the grid covers the bladder with margin."""
        _, profile, grid, _ = filled
        outer = (profile.bladder_radius + profile.wall_thickness) * 1e-3
        assert grid.r_faces[-1] > outer
        assert grid.z_faces[0] < profile.tube_bottom_z * 1e-3
        assert grid.z_faces[-1] > outer

    def test_coarse_cells_rejected(self, pathological):
        """Test fluid cells coarser than the wall raise."""
        config = pathological.model_copy(update={"mesh": MeshSettings(fluid_cell_size=2.0)})
        with pytest.raises(ConfigurationError):
            mesh_fluid(config, build_profile(config))
