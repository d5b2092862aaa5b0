"""Structured Lagrangian quad mesh of the wall strip and the support plate.

Coordinates are stored in metres. Elements are 4-node quads numbered
counter-clockwise in the (r, z) plane. Boundary facets are stored as node
pairs (a, b) whose left-hand normal (-dz, dr) points out of the solid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from uro_fsi.config import MeshSettings
from uro_fsi.errors import MeshingError
from uro_fsi.mesh.profile import AxisymProfile
from uro_fsi.utils import MM

logger = logging.getLogger(__name__)

MATERIAL_NAMES: tuple[str, ...] = ("bladder", "urethra", "support")
BLADDER, URETHRA, SUPPORT = range(3)

FACET_SETS: tuple[str, ...] = (
    "outer_top_hemisphere",
    "wetted_inner_surface",
    "support_fixed_edge",
    "urethra_outlet",
)

# 2×2 Gauss rule on the reference square
_G = 1.0 / math.sqrt(3.0)
GAUSS_POINTS = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
GAUSS_WEIGHTS = np.ones(4)

_XI = np.array([-1.0, 1.0, 1.0, -1.0])
_ETA = np.array([-1.0, -1.0, 1.0, 1.0])


def shape_functions(xi: float, eta: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Bilinear shape functions and their reference derivatives.

    Returns:
        (N, dN) with N of shape (4,) and dN of shape (2, 4) holding
        (∂/∂ξ, ∂/∂η).
    """
    n = 0.25 * (1.0 + _XI * xi) * (1.0 + _ETA * eta)
    dn = np.vstack([0.25 * _XI * (1.0 + _ETA * eta), 0.25 * _ETA * (1.0 + _XI * xi)])
    return n, dn


N_GAUSS = np.array([shape_functions(xi, eta)[0] for xi, eta in GAUSS_POINTS])  # (4, 4)
DN_GAUSS = np.array([shape_functions(xi, eta)[1] for xi, eta in GAUSS_POINTS])  # (4, 2, 4)


def jacobians(coords: NDArray[np.float64]) -> NDArray[np.float64]:
    """Jacobian matrices at the Gauss points.

    Args:
        coords: Element nodal coordinates, shape (E, 4, 2).

    Returns:
        Array of shape (E, 4, 2, 2) with J[e, g, k, d] = ∂x_d/∂ξ_k.
    """
    return np.einsum("gka,ead->egkd", DN_GAUSS, coords)


def jacobian_determinants(coords: NDArray[np.float64]) -> NDArray[np.float64]:
    """det J at every Gauss point, shape (E, 4)."""
    jac = jacobians(coords)
    return jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]


@dataclass
class LagrangianMesh:
    """Quad mesh of all solid parts in reference configuration (metres)."""

    nodes: NDArray[np.float64]  # (N, 2)
    elements: NDArray[np.int64]  # (E, 4)
    material: NDArray[np.int64]  # (E,) index into MATERIAL_NAMES
    facet_sets: dict[str, NDArray[np.int64]]  # name -> (F, 2)
    fixed_nodes: NDArray[np.int64]  # both DOFs held
    axis_nodes: NDArray[np.int64]  # ur held
    lumen_nodes: NDArray[np.int64]  # inner wall nodes, urethra bottom to top pole
    outlines: dict[str, NDArray[np.int64]]  # closed node loops of each solid part
    through_thickness: int
    strip_shape: tuple[int, int]  # (elements along the strip, elements through the wall)
    segment_counts: dict[str, int] = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def facets(self, name: str) -> NDArray[np.int64]:
        """Return a named facet set.

        Raises:
            KeyError: If the set name is unknown.
        """
        if name not in self.facet_sets:
            raise KeyError(f"Unknown facet set: {name}. Available: {', '.join(self.facet_sets)}")
        return self.facet_sets[name]

    def element_coords(self, positions: NDArray[np.float64] | None = None) -> NDArray[np.float64]:
        """Nodal coordinates per element, shape (E, 4, 2)."""
        pts = self.nodes if positions is None else positions
        return pts[self.elements]

    def boundary_facets(self) -> NDArray[np.int64]:
        """Exterior element edges off the symmetry axis, outward-oriented."""
        return exterior_facets(self.elements, self.nodes)

    def nodes_mm(self) -> NDArray[np.float64]:
        return self.nodes / MM


def exterior_facets(
    elements: NDArray[np.int64],
    nodes: NDArray[np.float64],
    axis_tol: float = 1e-12,
    return_owner: bool = False,
) -> NDArray[np.int64] | tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Edges used by exactly one element, excluding edges lying on r = 0.

    Returned pairs are reversed from the element's counter-clockwise order so
    that (-dz, dr) points out of the solid.

    Args:
        elements: Quad connectivity (E, 4).
        nodes: Nodal coordinates (N, 2).
        axis_tol: Radius below which a node counts as on the axis.
        return_owner: Also return the element owning each facet.

    Returns:
        Facets (F, 2), plus owner element ids (F,) when requested.
    """
    edges = np.stack(
        [elements[:, [1, 0]], elements[:, [2, 1]], elements[:, [3, 2]], elements[:, [0, 3]]],
        axis=1,
    ).reshape(-1, 2)
    owner = np.repeat(np.arange(len(elements)), 4)
    key = np.sort(edges, axis=1)
    _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    single = counts[inverse.ravel()] == 1
    out, owner = edges[single], owner[single]
    on_axis = (np.abs(nodes[out[:, 0], 0]) < axis_tol) & (np.abs(nodes[out[:, 1], 0]) < axis_tol)
    if return_owner:
        return out[~on_axis], owner[~on_axis]
    return out[~on_axis]


def _segment_breaks(lengths: list[float], h: float) -> tuple[NDArray[np.float64], list[int]]:
    counts = [max(1, math.ceil(length / h - 1e-9)) for length in lengths]
    breaks = [np.zeros(1)]
    start = 0.0
    for length, n in zip(lengths, counts, strict=True):
        breaks.append(np.linspace(start, start + length, n + 1)[1:])
        start += length
    return np.concatenate(breaks), counts


def _structured_elements(n_i: int, n_j: int, offset: int = 0) -> NDArray[np.int64]:
    ii, jj = np.meshgrid(np.arange(n_i), np.arange(n_j), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()

    def nid(i: NDArray[np.int64], j: NDArray[np.int64]) -> NDArray[np.int64]:
        return offset + i * (n_j + 1) + j

    return np.column_stack([nid(ii, jj), nid(ii + 1, jj), nid(ii + 1, jj + 1), nid(ii, jj + 1)])


def mesh_solid(profile: AxisymProfile, settings: MeshSettings) -> LagrangianMesh:
    """Sweep structured quads along the wall strip and the support plate.

    Args:
        profile: Geometry to mesh.
        settings: Target element size and through-thickness count.

    Returns:
        LagrangianMesh in metres with all facet sets populated.

    Raises:
        MeshingError: If any element has a non-positive Jacobian at a Gauss point.
    """
    h = settings.target_solid_element_size
    nt = settings.solid_elements_through_thickness
    if nt is None:
        nt = max(1, math.ceil(profile.wall_thickness / h - 1e-9))

    lengths = [
        profile.upper_arc_length,
        profile.arc_length - profile.upper_arc_length,
        profile.fillet_length,
        profile.urethra_length,
    ]
    s, counts = _segment_breaks(lengths, h)
    n_top, n_bottom, n_fillet, n_tube = counts
    ns = len(s) - 1

    mid, tangent, thickness = profile.sample(s)
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    frac = np.linspace(-0.5, 0.5, nt + 1)
    strip = mid[:, None, :] + (frac[None, :, None] * thickness[:, None, None]) * normal[:, None, :]
    strip[0, :, 0] = 0.0  # top pole row lies on the axis
    nodes = [strip.reshape(-1, 2)]

    def sid(i: int, j: int) -> int:
        return i * (nt + 1) + j

    elements = [_structured_elements(ns, nt)]
    strip_material = np.where(
        np.repeat(np.arange(ns), nt) < n_top + n_bottom + n_fillet, BLADDER, URETHRA
    )
    material = [strip_material]

    facet_sets: dict[str, NDArray[np.int64]] = {
        "outer_top_hemisphere": np.array([[sid(i, nt), sid(i + 1, nt)] for i in range(n_top)]),
        "wetted_inner_surface": np.array(
            [[sid(i + 1, 0), sid(i, 0)] for i in range(ns - 1, -1, -1)]
        ),
        "urethra_outlet": np.array([[sid(ns, j + 1), sid(ns, j)] for j in range(nt)]),
        "support_fixed_edge": np.zeros((0, 2), dtype=np.int64),
    }
    fixed = [np.array([sid(ns, j) for j in range(nt + 1)])]
    axis_nodes = np.array([sid(0, j) for j in range(nt + 1)])
    lumen_nodes = np.array([sid(i, 0) for i in range(ns, -1, -1)])
    outlines = {
        "strip": np.array(
            [sid(i, 0) for i in range(ns, -1, -1)]
            + [sid(0, j) for j in range(1, nt + 1)]
            + [sid(i, nt) for i in range(1, ns + 1)]
            + [sid(ns, j) for j in range(nt - 1, 0, -1)]
        )
    }
    segment_counts = {
        "upper_arc": n_top,
        "lower_arc": n_bottom,
        "fillet": n_fillet,
        "tube": n_tube,
        "through_thickness": nt,
    }

    if profile.support is not None:
        sup = profile.support
        nr = max(1, math.ceil((sup.r_outer - sup.r_inner) / h - 1e-9))
        nz = max(1, math.ceil(sup.thickness / h - 1e-9))
        offset = len(nodes[0])
        rr, zz = np.meshgrid(
            np.linspace(sup.r_inner, sup.r_outer, nr + 1),
            np.linspace(sup.z_bottom, sup.z_top, nz + 1),
            indexing="ij",
        )
        nodes.append(np.column_stack([rr.ravel(), zz.ravel()]))
        elements.append(_structured_elements(nr, nz, offset))
        material.append(np.full(nr * nz, SUPPORT))

        def pid(i: int, j: int) -> int:
            return offset + i * (nz + 1) + j

        facet_sets["support_fixed_edge"] = np.array([[pid(nr, j + 1), pid(nr, j)] for j in range(nz)])
        fixed.append(np.array([pid(nr, j) for j in range(nz + 1)]))
        outlines["support"] = np.array(
            [pid(i, 0) for i in range(nr + 1)]
            + [pid(nr, j) for j in range(1, nz + 1)]
            + [pid(i, nz) for i in range(nr - 1, -1, -1)]
            + [pid(0, j) for j in range(nz - 1, 0, -1)]
        )
        segment_counts["support_radial"] = nr
        segment_counts["support_thickness"] = nz

    mesh = LagrangianMesh(
        nodes=np.vstack(nodes) * MM,
        elements=np.vstack(elements).astype(np.int64),
        material=np.concatenate(material).astype(np.int64),
        facet_sets={k: v.astype(np.int64).reshape(-1, 2) for k, v in facet_sets.items()},
        fixed_nodes=np.concatenate(fixed).astype(np.int64),
        axis_nodes=axis_nodes.astype(np.int64),
        lumen_nodes=lumen_nodes.astype(np.int64),
        outlines={k: v.astype(np.int64) for k, v in outlines.items()},
        through_thickness=nt,
        strip_shape=(ns, nt),
        segment_counts=segment_counts,
    )

    det = jacobian_determinants(mesh.element_coords())
    bad = np.flatnonzero(np.any(det <= 0.0, axis=1))
    if bad.size:
        raise MeshingError(
            f"Element {int(bad[0])} has a non-positive Jacobian "
            f"({bad.size} degenerate elements)",
            element_id=int(bad[0]),
        )

    logger.info(
        f"Solid mesh: {mesh.n_nodes} nodes, {mesh.n_elements} elements "
        f"({ns}x{nt} strip, {mesh.n_elements - ns * nt} support)"
    )
    return mesh


def mesh_spherical_shell(
    inner_radius: float,
    outer_radius: float,
    n_meridian: int,
    n_thickness: int,
    material: int = BLADDER,
) -> LagrangianMesh:
    """Closed thick spherical shell centred at the origin, pole to pole.

    Used for the static and breathing-mode checks of the solid solver.

    Args:
        inner_radius: Inner radius in mm.
        outer_radius: Outer radius in mm.
        n_meridian: Elements from the top pole to the bottom pole.
        n_thickness: Elements through the wall.
        material: Material index of every element.

    Returns:
        LagrangianMesh in metres with facet sets "outer_surface" and
        "wetted_inner_surface" (the latter facing the cavity).

    Raises:
        MeshingError: If the radii are not ordered or the counts are not positive.
    """
    if not 0.0 < inner_radius < outer_radius:
        raise MeshingError(f"Shell radii must satisfy 0 < a < b, got a={inner_radius}, b={outer_radius}")
    if n_meridian < 2 or n_thickness < 1:
        raise MeshingError(f"Shell needs at least 2x1 elements, got {n_meridian}x{n_thickness}")
    nt = n_thickness
    theta = np.linspace(0.0, math.pi, n_meridian + 1)
    rho = np.linspace(inner_radius, outer_radius, nt + 1)
    r = np.outer(np.sin(theta), rho)
    r[0, :] = 0.0
    r[-1, :] = 0.0
    z = np.outer(np.cos(theta), rho)
    nodes = np.column_stack([r.ravel(), z.ravel()]) * MM

    def sid(i: int, j: int) -> int:
        return i * (nt + 1) + j

    ring = range(n_meridian)
    mesh = LagrangianMesh(
        nodes=nodes,
        elements=_structured_elements(n_meridian, nt),
        material=np.full(n_meridian * nt, material, dtype=np.int64),
        facet_sets={
            "outer_surface": np.array([[sid(i, nt), sid(i + 1, nt)] for i in ring], dtype=np.int64),
            "wetted_inner_surface": np.array(
                [[sid(i + 1, 0), sid(i, 0)] for i in reversed(ring)], dtype=np.int64
            ),
        },
        fixed_nodes=np.zeros(0, dtype=np.int64),
        axis_nodes=np.array(
            [sid(0, j) for j in range(nt + 1)] + [sid(n_meridian, j) for j in range(nt + 1)],
            dtype=np.int64,
        ),
        lumen_nodes=np.array([sid(i, 0) for i in range(n_meridian, -1, -1)], dtype=np.int64),
        outlines={
            "strip": np.array(
                [sid(i, 0) for i in range(n_meridian, -1, -1)]
                + [sid(0, j) for j in range(1, nt + 1)]
                + [sid(i, nt) for i in range(1, n_meridian + 1)]
                + [sid(n_meridian, j) for j in range(nt - 1, 0, -1)],
                dtype=np.int64,
            )
        },
        through_thickness=nt,
        strip_shape=(n_meridian, nt),
    )
    logger.debug(f"Spherical shell mesh: {mesh.n_elements} elements, a={inner_radius} b={outer_radius} mm")
    return mesh
