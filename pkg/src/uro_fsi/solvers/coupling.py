"""Euler-Lagrange coupling and structure self-contact.

The fluid sees the structure through the open fraction of each Euler cell,
recomputed from the deformed wall every step. The structure takes the exact
reaction of the wall force the porous fluid update applies, so the momentum
given to the wall is the momentum taken from the urine. Contact
is a node-to-facet penalty over the exterior edges of all solid parts, plus
a penalty that keeps nodes off the negative-r side of the symmetry axis.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from matplotlib.path import Path
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from uro_fsi.config import MaterialSet
from uro_fsi.errors import CouplingError
from uro_fsi.mesh.fluid import COVERED, FLUID, VOID, EulerGrid, FluidState
from uro_fsi.mesh.solid import MATERIAL_NAMES, LagrangianMesh, exterior_facets
from uro_fsi.solvers.fluid import COVER_THRESHOLD, open_fraction, wall_force

logger = logging.getLogger(__name__)

DEGENERATE_LENGTH = 1e-12  # m


@dataclass
class CouplingSurface:
    """Current wetted facets plus the polygons used to classify Euler cells."""

    facets: NDArray[np.int64]  # (F, 2) node pairs, outward (into the lumen)
    positions: NDArray[np.float64]  # (N, 2) current nodal coordinates
    velocities: NDArray[np.float64]  # (N, 2)
    lumen_polygon: NDArray[np.float64]  # (M, 2) closed along the axis
    solid_polygons: list[NDArray[np.float64]]

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @property
    def endpoints(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self.positions[self.facets[:, 0]], self.positions[self.facets[:, 1]]

    @property
    def lengths(self) -> NDArray[np.float64]:
        a, b = self.endpoints
        return np.linalg.norm(b - a, axis=1)

    @property
    def midpoints(self) -> NDArray[np.float64]:
        a, b = self.endpoints
        return 0.5 * (a + b)

    @property
    def normals(self) -> NDArray[np.float64]:
        """Unit normals pointing from the wall into the fluid."""
        a, b = self.endpoints
        d = b - a
        length = np.linalg.norm(d, axis=1)
        return np.column_stack([-d[:, 1], d[:, 0]]) / np.where(length > 0, length, 1.0)[:, None]

    @property
    def wetted_area(self) -> NDArray[np.float64]:
        """Ring area 2π r̄ L of each facet."""
        return 2.0 * math.pi * self.midpoints[:, 0] * self.lengths

    @property
    def facet_velocity(self) -> NDArray[np.float64]:
        return 0.5 * (self.velocities[self.facets[:, 0]] + self.velocities[self.facets[:, 1]])


@dataclass
class CellClassification:
    """Open fraction and lumen membership of every Euler cell."""

    phi: NDArray[np.float64]
    lumen: NDArray[np.bool_]
    status: NDArray[np.int8]
    cover_threshold: float = COVER_THRESHOLD


@dataclass
class CouplingLoad:
    """Fluid pressure loads on the wetted wall."""

    forces: NDArray[np.float64]  # (N, 2)
    facet_pressure: NDArray[np.float64]  # (F,) gauge pressure one cell off the facet
    sampled: NDArray[np.bool_]  # (F,) facet found an open fluid cell
    liquid: NDArray[np.bool_]  # (F,) the sampled cell holds urine
    reaction: NDArray[np.float64]  # (nr, nz, 2) wall force on the urine of each cell

    @property
    def n_dry(self) -> int:
        return int(np.count_nonzero(~self.sampled))


def wetted_surface(
    mesh: LagrangianMesh,
    positions: NDArray[np.float64],
    velocities: NDArray[np.float64] | None = None,
) -> CouplingSurface:
    """Collect the wetted facets and part outlines at the current positions.

    Args:
        mesh: Solid mesh.
        positions: Current nodal coordinates (N, 2).
        velocities: Nodal velocities; zero when omitted.

    Returns:
        CouplingSurface for this configuration.
    """
    lumen = positions[mesh.lumen_nodes]
    # close the lumen across the axis below the urethra outlet
    closing = np.array([[0.0, lumen[0, 1]]])
    polygon = np.vstack([closing, lumen])
    return CouplingSurface(
        facets=mesh.facets("wetted_inner_surface"),
        positions=positions,
        velocities=np.zeros_like(positions) if velocities is None else velocities,
        lumen_polygon=polygon,
        solid_polygons=[positions[loop] for loop in mesh.outlines.values()],
    )


def _segment_distance(
    points: NDArray[np.float64], a: NDArray[np.float64], b: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Distance from points to segments, broadcasting over leading axes."""
    d = b - a
    rel = points - a
    t = np.clip(np.sum(rel * d, axis=-1) / np.maximum(np.sum(d * d, axis=-1), 1e-300), 0.0, 1.0)
    closest = a + t[..., None] * d
    return np.linalg.norm(points - closest, axis=-1)


def wall_distance(
    surface: CouplingSurface, points: NDArray[np.float64], cutoff: float
) -> NDArray[np.float64]:
    """Unsigned distance to the nearest wetted facet; +inf beyond the cutoff."""
    out = np.full(len(points), np.inf)
    if surface.n_facets == 0 or len(points) == 0:
        return out
    a, b = surface.endpoints
    tree = cKDTree(surface.midpoints)
    k = min(4, surface.n_facets)
    reach = cutoff + 0.5 * float(surface.lengths.max())
    _, idx = tree.query(points, k=k, distance_upper_bound=reach)
    idx = np.asarray(idx).reshape(len(points), k)
    valid = idx < surface.n_facets
    safe = np.where(valid, idx, 0)
    dist = _segment_distance(points[:, None, :], a[safe], b[safe])
    dist = np.where(valid, dist, np.inf)
    out = dist.min(axis=1)
    out[out > cutoff] = np.inf
    return out


def _wall_band(grid: EulerGrid, surface: CouplingSurface, reach: float) -> NDArray[np.bool_]:
    """Cells (flattened, C order) within about ``reach`` of any part outline."""
    pieces = []
    for loop in [surface.lumen_polygon, *surface.solid_polygons]:
        a, b = loop, np.roll(loop, -1, axis=0)
        n = np.maximum(np.ceil(np.linalg.norm(b - a, axis=1) / grid.h), 1).astype(np.int64)
        seg = np.repeat(np.arange(len(loop)), n)
        t = (np.arange(n.sum()) - np.repeat(np.cumsum(n) - n, n)) / np.repeat(n, n)
        pieces.append(a[seg] + t[:, None] * (b - a)[seg])
    points = np.vstack(pieces)
    k = math.ceil(reach / grid.h) + 1
    i = np.floor(points[:, 0] / grid.dr).astype(np.int64)
    j = np.floor((points[:, 1] - grid.z0) / grid.dz).astype(np.int64)
    steps = np.arange(-k, k + 1)
    ii = (i[:, None, None] + steps[None, :, None]).repeat(len(steps), axis=2).ravel()
    jj = (j[:, None, None] + steps[None, None, :]).repeat(len(steps), axis=1).ravel()
    keep = (ii >= 0) & (ii < grid.nr) & (jj >= 0) & (jj < grid.nz)
    band = np.zeros(grid.shape, dtype=bool)
    band[ii[keep], jj[keep]] = True
    return band.ravel()


def _contains(polygon: NDArray[np.float64], points: NDArray[np.float64]) -> NDArray[np.bool_]:
    """Point-in-polygon test restricted to the polygon's bounding box."""
    inside = np.zeros(len(points), dtype=bool)
    box = np.all((points >= polygon.min(axis=0)) & (points <= polygon.max(axis=0)), axis=1)
    if np.any(box):
        inside[box] = Path(polygon).contains_points(points[box])
    return inside


def classify_cells(
    grid: EulerGrid,
    surface: CouplingSurface,
    previous: FluidState | None = None,
    cover_threshold: float = COVER_THRESHOLD,
) -> CellClassification:
    """Open fraction of every Euler cell for the current wall position.

    Cells inside a solid part are closed, cells elsewhere open. Within half a
    cell of the wetted surface the open fraction ramps linearly with the
    signed distance, 0.5 + s·d/h, s = +1 on the lumen side. With a previous
    state only cells within a few cells of a part outline are recomputed.

    Args:
        grid: Eulerian grid.
        surface: Current wetted surface.
        previous: Prior fluid state; its occupancy is kept away from the wall.
        cover_threshold: Open fraction below which a cell counts as covered.

    Returns:
        CellClassification.

    Raises:
        CouplingError: If a wetted facet has zero length.
    """
    if surface.n_facets == 0:
        if previous is not None:
            return CellClassification(
                phi=previous.phi.copy(),
                lumen=np.zeros(grid.shape, dtype=bool),
                status=previous.status.copy(),
                cover_threshold=cover_threshold,
            )
        return CellClassification(
            phi=np.ones(grid.shape),
            lumen=np.zeros(grid.shape, dtype=bool),
            status=np.full(grid.shape, VOID, dtype=np.int8),
            cover_threshold=cover_threshold,
        )

    short = np.flatnonzero(surface.lengths < DEGENERATE_LENGTH)
    if short.size:
        raise CouplingError(
            f"Wetted facet {int(short[0])} is degenerate; containment is ambiguous",
            facet_id=int(short[0]),
        )

    h = grid.h
    centres = grid.centres()
    if previous is None:
        window = np.ones(len(centres), dtype=bool)
    else:
        window = _wall_band(grid, surface, 2.0 * h)
    pts = centres[window]

    in_lumen = _contains(surface.lumen_polygon, pts)
    in_solid = np.zeros(len(pts), dtype=bool)
    for polygon in surface.solid_polygons:
        in_solid |= _contains(polygon, pts)
    in_lumen &= ~in_solid

    phi_w = np.where(in_solid, 0.0, 1.0)
    dist = wall_distance(surface, pts, 0.5 * h)
    near = np.isfinite(dist)
    ramp_in = near & in_lumen
    ramp_out = near & in_solid
    phi_w[ramp_in] = 0.5 + dist[ramp_in] / h
    phi_w[ramp_out] = 0.5 - dist[ramp_out] / h

    phi = np.ones(grid.nr * grid.nz)
    lumen = np.zeros(len(centres), dtype=bool)
    if previous is not None:
        phi = previous.phi.ravel().copy()
    phi[window] = np.clip(phi_w, 0.0, 1.0)
    lumen[window] = in_lumen
    phi = phi.reshape(grid.shape)
    lumen = lumen.reshape(grid.shape)

    status = np.full(grid.shape, VOID, dtype=np.int8)
    if previous is not None:
        status[previous.status == FLUID] = FLUID
    status[phi < cover_threshold] = COVERED
    return CellClassification(phi=phi, lumen=lumen, status=status, cover_threshold=cover_threshold)


def nearest_facets(
    surface: CouplingSurface, points: NDArray[np.float64]
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    """Nearest wetted facet of each point and the projection parameter along it.

    Returns:
        (facet index, ξ in [0, 1] from the first to the second facet node).
    """
    a, b = surface.endpoints
    k = min(4, surface.n_facets)
    _, idx = cKDTree(surface.midpoints).query(points, k=k)
    idx = np.asarray(idx).reshape(len(points), k)
    dist = _segment_distance(points[:, None, :], a[idx], b[idx])
    pick = idx[np.arange(len(points)), np.argmin(dist, axis=1)]
    d = b[pick] - a[pick]
    xi = np.sum((points - a[pick]) * d, axis=1) / np.maximum(np.sum(d * d, axis=1), 1e-300)
    return pick, np.clip(xi, 0.0, 1.0)


def fluid_load_on_structure(
    grid: EulerGrid,
    state: FluidState,
    surface: CouplingSurface,
    pressure: NDArray[np.float64],
    cover_threshold: float = COVER_THRESHOLD,
) -> CouplingLoad:
    """Nodal loads of the fluid gauge pressure on the wetted wall.

    The wall force on the urine of every cell (see wall_force) is handed back
    to the structure with the opposite sign, split between the two nodes of
    the nearest wetted facet by the projection of the cell centre. The sum of
    the nodal forces is therefore exactly minus the momentum rate the fluid
    update takes from the walls. Each facet also records the gauge pressure
    of the cell one cell width off its midpoint along the normal.

    Args:
        grid: Eulerian grid.
        state: Fluid state (for the open fraction and datum).
        surface: Current wetted surface.
        pressure: Absolute cell pressures (nr, nz), as used by the fluid step.
        cover_threshold: Open fraction below which a cell is closed.

    Returns:
        CouplingLoad with nodal forces on all mesh nodes.
    """
    n_nodes = len(surface.positions)
    open_frac = open_fraction(state.phi, cover_threshold)
    reaction = wall_force(grid, open_frac, pressure - state.p_ref)
    if surface.n_facets == 0:
        empty = np.zeros(0, dtype=bool)
        return CouplingLoad(np.zeros((n_nodes, 2)), np.zeros(0), empty, empty, reaction)

    probe = surface.midpoints + surface.normals * grid.h
    i = np.floor(probe[:, 0] / grid.dr).astype(np.int64)
    j = np.floor((probe[:, 1] - grid.z0) / grid.dz).astype(np.int64)
    inside = (i >= 0) & (i < grid.nr) & (j >= 0) & (j < grid.nz)
    ii, jj = np.clip(i, 0, grid.nr - 1), np.clip(j, 0, grid.nz - 1)
    sampled = inside & (open_frac[ii, jj] > 0.0)
    liquid = sampled & (state.status[ii, jj] == FLUID)
    gauge = np.where(sampled, pressure[ii, jj] - state.p_ref, 0.0)
    if not np.all(sampled):
        logger.debug(f"{int(np.count_nonzero(~sampled))} wetted facets have no adjacent fluid cell")

    flat = reaction.reshape(-1, 2)
    loaded = np.flatnonzero(np.any(flat != 0.0, axis=1))
    forces = np.zeros((n_nodes, 2))
    if loaded.size:
        facet, xi = nearest_facets(surface, grid.centres()[loaded])
        push = -flat[loaded]
        nodes = np.concatenate([surface.facets[facet, 0], surface.facets[facet, 1]])
        shares = np.vstack([(1.0 - xi)[:, None] * push, xi[:, None] * push])
        forces[:, 0] = np.bincount(nodes, shares[:, 0], minlength=n_nodes)
        forces[:, 1] = np.bincount(nodes, shares[:, 1], minlength=n_nodes)
    return CouplingLoad(
        forces=forces, facet_pressure=gauge, sampled=sampled, liquid=liquid, reaction=reaction
    )


def datum_power(surface: CouplingSurface, load: CouplingLoad, p_ref: float) -> float:
    """Rate of work of the datum pressure on the fluid side of the wall, W.

    The structure only feels the gauge pressure, so p_ref times the volume
    rate swept into urine-filled cells is work from outside the audit.
    """
    if surface.n_facets == 0 or p_ref == 0.0:
        return 0.0
    vn = np.sum(surface.facet_velocity * surface.normals, axis=1)
    return float(p_ref * np.sum(np.where(load.liquid, vn * surface.wetted_area, 0.0)))


@dataclass
class ContactSurface:
    """Exterior facets and per-node data for penalty contact."""

    facets: NDArray[np.int64]  # (F, 2)
    facet_element_nodes: NDArray[np.int64]  # (F, 4) nodes of the owning element
    facet_modulus: NDArray[np.float64]  # (F,) Young's modulus of the owner
    nodes: NDArray[np.int64]  # (K,) boundary nodes
    node_modulus: NDArray[np.float64]  # (K,)
    node_length: NDArray[np.float64]  # (K,) mean reference length of adjacent facets
    on_axis: NDArray[np.bool_]  # (K,) reference r = 0
    n_nodes: int


@dataclass
class ContactResult:
    """Penalty forces and contact diagnostics."""

    forces: NDArray[np.float64]  # (N, 2)
    max_penetration: float  # m
    n_active: int
    energy: float  # J


def contact_surface(mesh: LagrangianMesh, materials: MaterialSet) -> ContactSurface:
    """Precompute the exterior facets used for self-contact."""
    facets, owner = exterior_facets(mesh.elements, mesh.nodes, return_owner=True)
    moduli = np.array([getattr(materials, name).E for name in MATERIAL_NAMES])
    facet_modulus = moduli[mesh.material[owner]]

    nodes = np.unique(facets)
    ref_len = np.linalg.norm(mesh.nodes[facets[:, 1]] - mesh.nodes[facets[:, 0]], axis=1)
    n = mesh.n_nodes
    count = np.bincount(facets.ravel(), minlength=n)
    length_sum = np.bincount(facets.ravel(), np.repeat(ref_len, 2), minlength=n)
    mod_max = np.zeros(n)
    np.maximum.at(mod_max, facets.ravel(), np.repeat(facet_modulus, 2))

    return ContactSurface(
        facets=facets,
        facet_element_nodes=mesh.elements[owner],
        facet_modulus=facet_modulus,
        nodes=nodes,
        node_modulus=mod_max[nodes],
        node_length=length_sum[nodes] / np.maximum(count[nodes], 1),
        on_axis=np.abs(mesh.nodes[nodes, 0]) < 1e-12,
        n_nodes=n,
    )


def _scatter(n: int, idx: NDArray[np.int64], values: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros((n, 2))
    out[:, 0] = np.bincount(idx, values[:, 0], minlength=n)
    out[:, 1] = np.bincount(idx, values[:, 1], minlength=n)
    return out


def penalty_contact(
    contact: ContactSurface,
    positions: NDArray[np.float64],
    gap_tolerance: float,
    stiffness_scale: float,
    stiffness: float | None = None,
) -> ContactResult:
    """Node-to-facet penalty forces for all exterior surfaces.

    A boundary node interacts with a facet of another element when its
    outward normal opposes the facet normal, it projects inside the facet
    and it lies behind the facet by no more than gap_tolerance × facet
    length. The node is pushed out along the facet normal with k·δ and the
    reaction is shared by the facet nodes, so forces sum to zero.

    Args:
        contact: Precomputed exterior surface.
        positions: Current nodal coordinates (N, 2).
        gap_tolerance: Detection depth as a fraction of the facet length.
        stiffness_scale: k = stiffness_scale · E · L when no stiffness is given.
        stiffness: Explicit penalty stiffness in N/m.

    Returns:
        ContactResult with nodal forces on all mesh nodes.
    """
    n = contact.n_nodes
    forces = np.zeros((n, 2))
    if len(contact.facets) == 0:
        return ContactResult(forces, 0.0, 0, 0.0)

    a = positions[contact.facets[:, 0]]
    b = positions[contact.facets[:, 1]]
    d = b - a
    length = np.linalg.norm(d, axis=1)
    safe_len = np.where(length > 0, length, 1.0)
    normal = np.column_stack([-d[:, 1], d[:, 0]]) / safe_len[:, None]

    # node normals: length-weighted average of adjacent facet normals
    weighted = np.repeat(normal * length[:, None], 2, axis=0)
    node_n = _scatter(n, contact.facets.ravel(), weighted)[contact.nodes]
    node_n /= np.maximum(np.linalg.norm(node_n, axis=1), 1e-300)[:, None]

    x = positions[contact.nodes]
    n_facets = len(contact.facets)
    k = min(8, n_facets)
    reach = float(length.max()) * (0.5 + gap_tolerance) + 1e-300
    _, idx = cKDTree(0.5 * (a + b)).query(x, k=k, distance_upper_bound=reach)
    idx = np.asarray(idx).reshape(len(x), k)
    valid = idx < n_facets
    f = np.where(valid, idx, 0)

    rel = x[:, None, :] - a[f]
    xi = np.sum(rel * d[f], axis=2) / (safe_len[f] ** 2)
    gap = np.sum(rel * normal[f], axis=2)
    own = np.any(contact.facet_element_nodes[f] == contact.nodes[:, None, None], axis=2)
    opposing = np.sum(node_n[:, None, :] * normal[f], axis=2) < 0.0
    depth = gap_tolerance * length[f]
    active = valid & ~own & opposing & (xi > 0.0) & (xi < 1.0) & (gap < 0.0) & (gap >= -depth)

    energy = 0.0
    max_pen = 0.0
    n_active = 0
    hit = np.flatnonzero(active.any(axis=1))
    if hit.size:
        score = np.where(active[hit], -gap[hit], np.inf)
        pick = np.argmin(score, axis=1)
        fac = f[hit, pick]
        delta = -gap[hit, pick]
        xi_sel = xi[hit, pick]
        k_pen = (
            np.full(hit.size, stiffness)
            if stiffness is not None
            else stiffness_scale * contact.facet_modulus[fac] * length[fac]
        )
        push = (k_pen * delta)[:, None] * normal[fac]
        idx_all = np.concatenate(
            [contact.nodes[hit], contact.facets[fac, 0], contact.facets[fac, 1]]
        )
        vals = np.vstack([push, -(1.0 - xi_sel)[:, None] * push, -xi_sel[:, None] * push])
        forces += _scatter(n, idx_all, vals)
        energy += 0.5 * float(np.sum(k_pen * delta * delta))
        max_pen = float(delta.max())
        n_active += hit.size

    # symmetry axis: nodes off the axis must keep r >= 0
    crossed = np.flatnonzero(~contact.on_axis & (x[:, 0] < 0.0))
    if crossed.size:
        k_axis = (
            np.full(crossed.size, stiffness)
            if stiffness is not None
            else stiffness_scale * contact.node_modulus[crossed] * contact.node_length[crossed]
        )
        delta = -x[crossed, 0]
        forces[contact.nodes[crossed], 0] += k_axis * delta
        energy += 0.5 * float(np.sum(k_axis * delta * delta))
        max_pen = max(max_pen, float(delta.max()))
        n_active += crossed.size

    return ContactResult(forces=forces, max_penetration=max_pen, n_active=n_active, energy=energy)
