"""Tests for the Lagrangian quad mesh."""

import numpy as np
import pytest

from uro_fsi.config import MeshSettings
from uro_fsi.errors import MeshingError
from uro_fsi.mesh.profile import build_profile
from uro_fsi.mesh.solid import (
    BLADDER,
    FACET_SETS,
    SUPPORT,
    URETHRA,
    exterior_facets,
    jacobian_determinants,
    mesh_solid,
    mesh_spherical_shell,
)

COARSE = MeshSettings(target_solid_element_size=3.0)


@pytest.fixture
def supported_mesh(physiological):
    return mesh_solid(build_profile(physiological), COARSE)


@pytest.fixture
def free_mesh(pathological):
    return mesh_solid(build_profile(pathological), COARSE)


def _normals(nodes, facets):
    d = nodes[facets[:, 1]] - nodes[facets[:, 0]]
    n = np.column_stack([-d[:, 1], d[:, 0]])
    return n / np.linalg.norm(n, axis=1)[:, None]


class TestMeshSolid:
    """Tests for mesh_solid."""

    def test_positive_jacobians(self, supported_mesh):
        """Test every element is valid at every Gauss point."""
        det = jacobian_determinants(supported_mesh.element_coords())
        assert np.all(det > 0.0)

    def test_facet_sets(self, supported_mesh):
        """Test all named facet sets exist and are non-empty."""
        for name in FACET_SETS:
            assert len(supported_mesh.facets(name)) > 0

    def test_unknown_facet_set(self, free_mesh):
        """Test asking for a missing set raises."""
        with pytest.raises(KeyError):
            free_mesh.facets("lid")

    def test_no_support_without_support(self, free_mesh):
        """Test the pathological mesh has no support elements or edge."""
        assert not np.any(free_mesh.material == SUPPORT)
        assert len(free_mesh.facets("support_fixed_edge")) == 0
        assert len(free_mesh.fixed_nodes) == free_mesh.through_thickness + 1

    def test_materials(self, supported_mesh):
        """Test all three tissues are present."""
        assert set(np.unique(supported_mesh.material)) == {BLADDER, URETHRA, SUPPORT}

    def test_through_thickness(self, supported_mesh):
        """Test the strip has the requested elements through the wall."""
        ns, nt = supported_mesh.strip_shape
        assert nt == 3
        assert supported_mesh.segment_counts["through_thickness"] == 3
        assert np.count_nonzero(supported_mesh.material != SUPPORT) == ns * nt

    def test_derived_through_thickness(self, pathological):
        """Test a None count follows the element size."""
        mesh = mesh_solid(
            build_profile(pathological),
            MeshSettings(solid_elements_through_thickness=None, target_solid_element_size=0.5),
        )
        assert mesh.through_thickness == 3

    def test_refinement_quadruples_elements(self, physiological):
        """Test halving the element size gives about four times the elements."""
        profile = build_profile(physiological)
        coarse = mesh_solid(
            profile, MeshSettings(solid_elements_through_thickness=None, target_solid_element_size=0.75)
        )
        fine = mesh_solid(
            profile, MeshSettings(solid_elements_through_thickness=None, target_solid_element_size=0.375)
        )
        assert fine.through_thickness == 2 * coarse.through_thickness
        assert fine.n_elements / coarse.n_elements == pytest.approx(4.0, rel=0.1)

    @pytest.mark.slow
    def test_fine_resolution_count(self, physiological):
        """Test the fine settings land near 32,400 solid elements."""
        mesh = mesh_solid(build_profile(physiological), MeshSettings.fine())
        assert 0.5 * 32400 <= mesh.n_elements <= 1.5 * 32400

    def test_top_hemisphere_outward(self, free_mesh):
        """Test the pulse facets lie on the upper half and face outwards."""
        facets = free_mesh.facets("outer_top_hemisphere")
        nodes = free_mesh.nodes
        mid = 0.5 * (nodes[facets[:, 0]] + nodes[facets[:, 1]])
        assert np.all(mid[:, 1] > 0.0)
        assert np.all(np.sum(_normals(nodes, facets) * mid, axis=1) > 0.0)

    def test_wetted_faces_lumen(self, free_mesh):
        """Test wetted facets on the sphere face the centre."""
        facets = free_mesh.facets("wetted_inner_surface")
        nodes = free_mesh.nodes
        mid = 0.5 * (nodes[facets[:, 0]] + nodes[facets[:, 1]])
        upper = mid[:, 1] > 0.0
        assert np.any(upper)
        assert np.all(np.sum(_normals(nodes, facets)[upper] * mid[upper], axis=1) < 0.0)

    def test_axis_nodes(self, free_mesh):
        """Test the top pole row sits on the axis."""
        assert np.all(free_mesh.nodes[free_mesh.axis_nodes, 0] == 0.0)

    def test_lumen_runs_bottom_to_top(self, free_mesh):
        """Test the lumen polyline starts at the outlet and ends at the pole."""
        lumen = free_mesh.nodes[free_mesh.lumen_nodes]
        assert lumen[0, 1] < lumen[-1, 1]
        assert lumen[-1, 0] == 0.0

    def test_boundary_excludes_axis(self, free_mesh):
        """Test no exterior facet lies on r = 0."""
        facets = free_mesh.boundary_facets()
        on_axis = np.all(free_mesh.nodes[facets, 0] == 0.0, axis=1)
        assert not np.any(on_axis)


class TestExteriorFacets:
    """Tests for exterior_facets."""

    def test_single_quad(self, unit_quad):
        """Test a lone quad has four outward facets."""
        facets, owner = exterior_facets(unit_quad.elements, unit_quad.nodes, return_owner=True)
        assert len(facets) == 4
        assert np.all(owner == 0)
        centre = unit_quad.nodes.mean(axis=0)
        mid = 0.5 * (unit_quad.nodes[facets[:, 0]] + unit_quad.nodes[facets[:, 1]])
        assert np.all(np.sum(_normals(unit_quad.nodes, facets) * (mid - centre), axis=1) > 0.0)

    def test_shared_edge_dropped(self, make_quad_mesh):
        """Test two quads sharing an edge expose six facets."""
        mesh = make_quad_mesh([[(10, 0), (11, 0), (11, 1), (10, 1)]])
        nodes = np.vstack([mesh.nodes, np.array([[12e-3, 0.0], [12e-3, 1e-3]])])
        elements = np.array([[0, 1, 2, 3], [1, 4, 5, 2]])
        assert len(exterior_facets(elements, nodes)) == 6


class TestSphericalShell:
    """Tests for mesh_spherical_shell."""

    def test_counts(self, shell):
        """Test element, node and facet counts."""
        assert shell.n_elements == 96 * 2
        assert shell.n_nodes == 97 * 3
        assert len(shell.facets("outer_surface")) == 96
        assert len(shell.facets("wetted_inner_surface")) == 96

    def test_radii(self, shell):
        """Test inner and outer nodes lie on their spheres."""
        inner = shell.nodes[shell.lumen_nodes]
        assert np.allclose(np.linalg.norm(inner, axis=1), 43.5e-3)
        outer = shell.nodes[np.unique(shell.facets("outer_surface"))]
        assert np.allclose(np.linalg.norm(outer, axis=1), 45.0e-3)

    def test_valid_elements(self, shell):
        """Test every shell element has a positive Jacobian."""
        assert np.all(jacobian_determinants(shell.element_coords()) > 0.0)

    def test_poles_on_axis(self, shell):
        """Test both pole rows are held on the axis."""
        assert len(shell.axis_nodes) == 6
        assert np.all(shell.nodes[shell.axis_nodes, 0] == 0.0)

    def test_inner_faces_centre(self, shell):
        """Test inner facets point into the cavity."""
        facets = shell.facets("wetted_inner_surface")
        mid = 0.5 * (shell.nodes[facets[:, 0]] + shell.nodes[facets[:, 1]])
        assert np.all(np.sum(_normals(shell.nodes, facets) * mid, axis=1) < 0.0)

    def test_bad_radii(self):
        """Test unordered radii are rejected."""
        with pytest.raises(MeshingError):
            mesh_spherical_shell(45.0, 43.5, 8, 1)

    def test_too_coarse(self):
        """Test a single meridian element is rejected."""
        with pytest.raises(MeshingError):
            mesh_spherical_shell(43.5, 45.0, 1, 1)
