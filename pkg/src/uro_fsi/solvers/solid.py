"""Explicit dynamics of the axisymmetric linear-elastic solids.

Four-node quads with full 2×2 Gauss quadrature, lumped mass and central
difference time stepping. Kinematics are geometrically linear: strains are
evaluated with B matrices built once in the reference configuration, while
pressure loads follow the current configuration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse

from uro_fsi.config import LinearElastic, MaterialSet
from uro_fsi.errors import MeshingError, SimulationAborted
from uro_fsi.materials import dilatational_wave_speed, elasticity_matrix
from uro_fsi.mesh.solid import (
    DN_GAUSS,
    GAUSS_WEIGHTS,
    MATERIAL_NAMES,
    N_GAUSS,
    LagrangianMesh,
    jacobians,
)

logger = logging.getLogger(__name__)

# Below this radius a Gauss point is treated as lying on the axis
AXIS_EPS = 1e-12


@dataclass
class SolidState:
    """Nodal kinematics plus stress and energy bookkeeping."""

    u: NDArray[np.float64]  # (N, 2) displacement, m
    v: NDArray[np.float64]  # (N, 2) velocity, m/s
    stress: NDArray[np.float64]  # (E, 4, 4) per Gauss point (σrr, σzz, σθθ, σrz), Pa
    internal_energy: float = 0.0  # J
    external_work: float = 0.0  # J

    @classmethod
    def at_rest(cls, mesh: LagrangianMesh) -> SolidState:
        return cls(
            u=np.zeros((mesh.n_nodes, 2)),
            v=np.zeros((mesh.n_nodes, 2)),
            stress=np.zeros((mesh.n_elements, 4, 4)),
        )

    def positions(self, mesh: LagrangianMesh) -> NDArray[np.float64]:
        """Current nodal coordinates."""
        return mesh.nodes + self.u


@dataclass
class SolidModel:
    """Element operators precomputed for one mesh and material set."""

    mesh: LagrangianMesh
    B: NDArray[np.float64]  # (E, 4, 4, 8) strain-displacement at each Gauss point
    weights: NDArray[np.float64]  # (E, 4) detJ · w_g · 2πr
    D: NDArray[np.float64]  # (E, 4, 4)
    rho: NDArray[np.float64]  # (E,)
    wave_speed: NDArray[np.float64]  # (E,)
    mass: NDArray[np.float64]  # (N,) lumped
    fixed: NDArray[np.bool_]  # (N, 2) held DOFs

    @property
    def dof_index(self) -> NDArray[np.int64]:
        """Global DOF numbers of each element, shape (E, 8)."""
        e = self.mesh.elements
        return np.stack([2 * e, 2 * e + 1], axis=2).reshape(len(e), 8)


def _element_materials(mesh: LagrangianMesh, materials: MaterialSet) -> list[LinearElastic]:
    return [getattr(materials, name) for name in MATERIAL_NAMES]


def quadrature_weights(coords: NDArray[np.float64]) -> NDArray[np.float64]:
    """Axisymmetric integration weights detJ · w_g · 2πr_g, shape (E, 4).

    Raises:
        MeshingError: If an element has zero or negative area at a Gauss point.
    """
    jac = jacobians(coords)
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    bad = np.flatnonzero(np.any(det <= 0.0, axis=1))
    if bad.size:
        raise MeshingError(f"Element {int(bad[0])} has zero or negative area", int(bad[0]))
    r_g = np.einsum("ga,ea->eg", N_GAUSS, coords[..., 0])
    return det * GAUSS_WEIGHTS[None, :] * 2.0 * math.pi * r_g


def strain_displacement(coords: NDArray[np.float64]) -> NDArray[np.float64]:
    """Axisymmetric B matrices at the Gauss points, shape (E, 4, 4, 8).

    Rows are (εrr, εzz, εθθ, γrz); columns interleave (ur, uz) per node.
    The hoop row uses ur/r, or ∂ur/∂r where the Gauss point sits on the axis.
    """
    jac = jacobians(coords)  # (E, G, k, d)
    inv = np.linalg.inv(jac)
    # dN/dx_d = Σ_k (J^-1)[d, k] dN/dξ_k
    dndx = np.einsum("egdk,gka->egda", inv, DN_GAUSS)  # (E, G, 2, 4)
    r_g = np.einsum("ga,ea->eg", N_GAUSS, coords[..., 0])

    n_el = coords.shape[0]
    b = np.zeros((n_el, 4, 4, 8))
    b[:, :, 0, 0::2] = dndx[:, :, 0, :]
    b[:, :, 1, 1::2] = dndx[:, :, 1, :]
    on_axis = r_g < AXIS_EPS
    safe_r = np.where(on_axis, 1.0, r_g)
    hoop = N_GAUSS[None, :, :] / safe_r[..., None]
    b[:, :, 2, 0::2] = np.where(on_axis[..., None], dndx[:, :, 0, :], hoop)
    b[:, :, 3, 0::2] = dndx[:, :, 1, :]
    b[:, :, 3, 1::2] = dndx[:, :, 0, :]
    return b


def lumped_mass(mesh: LagrangianMesh, materials: MaterialSet) -> NDArray[np.float64]:
    """Row-sum lumped nodal masses, M_a = Σ ρ N_a 2πr detJ w.

    Args:
        mesh: Solid mesh.
        materials: Tissue densities.

    Returns:
        Nodal masses in kg, shape (N,).

    Raises:
        MeshingError: If an element has zero area.
    """
    weights = quadrature_weights(mesh.element_coords())
    rho = np.array([m.rho for m in _element_materials(mesh, materials)])[mesh.material]
    contrib = rho[:, None] * np.einsum("eg,ga->ea", weights, N_GAUSS)
    return np.bincount(mesh.elements.ravel(), contrib.ravel(), minlength=mesh.n_nodes)


def prepare(mesh: LagrangianMesh, materials: MaterialSet) -> SolidModel:
    """Precompute B matrices, weights, moduli and masses for a mesh."""
    coords = mesh.element_coords()
    mats = _element_materials(mesh, materials)
    d_all = np.array([elasticity_matrix(m) for m in mats])
    speeds = np.array([dilatational_wave_speed(m) for m in mats])
    rho = np.array([m.rho for m in mats])

    fixed = np.zeros((mesh.n_nodes, 2), dtype=bool)
    fixed[mesh.fixed_nodes, :] = True
    fixed[mesh.axis_nodes, 0] = True

    model = SolidModel(
        mesh=mesh,
        B=strain_displacement(coords),
        weights=quadrature_weights(coords),
        D=d_all[mesh.material],
        rho=rho[mesh.material],
        wave_speed=speeds[mesh.material],
        mass=lumped_mass(mesh, materials),
        fixed=fixed,
    )
    logger.debug(f"Solid model: total mass {model.mass.sum():.6g} kg")
    return model


def _assemble(model: SolidModel, element_vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    n = model.mesh.n_nodes
    flat = np.bincount(model.dof_index.ravel(), element_vectors.ravel(), minlength=2 * n)
    return flat.reshape(n, 2)


def strains(model: SolidModel, u: NDArray[np.float64]) -> NDArray[np.float64]:
    """Gauss-point strains (εrr, εzz, εθθ, γrz), shape (E, 4, 4)."""
    u_e = u.reshape(-1)[model.dof_index]
    return np.einsum("egcd,ed->egc", model.B, u_e)


def internal_forces(
    model: SolidModel, u: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64], float]:
    """Assemble ∫ Bᵀσ 2πr dA.

    Args:
        model: Precomputed element operators.
        u: Nodal displacements, shape (N, 2).

    Returns:
        (forces, stress, strain_energy): internal nodal forces (N, 2) in N,
        Gauss-point stresses (E, 4, 4) in Pa and the strain energy in J.
    """
    eps = strains(model, u)
    sig = np.einsum("ecd,egd->egc", model.D, eps)
    f_e = np.einsum("egcd,egc,eg->ed", model.B, sig, model.weights)
    energy = 0.5 * float(np.einsum("egc,egc,eg->", sig, eps, model.weights))
    return _assemble(model, f_e), sig, energy


def strain_energy(model: SolidModel, u: NDArray[np.float64]) -> float:
    """½ Σ w σ:ε over all Gauss points."""
    return internal_forces(model, u)[2]


def assemble_stiffness(model: SolidModel) -> sparse.csr_matrix:
    """Global stiffness matrix K = Σ ∫ Bᵀ D B 2πr dA, size 2N × 2N."""
    k_e = np.einsum("egcd,ecf,egfh,eg->edh", model.B, model.D, model.B, model.weights)
    dofs = model.dof_index
    rows = np.repeat(dofs, 8, axis=1).ravel()
    cols = np.tile(dofs, (1, 8)).ravel()
    n = 2 * model.mesh.n_nodes
    return sparse.coo_matrix((k_e.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def traction_forces(
    positions: NDArray[np.float64],
    facets: NDArray[np.int64],
    pressure: ArrayLike,
) -> NDArray[np.float64]:
    """Consistent nodal loads of a pressure acting on facets.

    The pressure pushes against the facet normal (-dz, dr), i.e. into the
    solid for outward-oriented facets.

    Args:
        positions: Current nodal coordinates (N, 2).
        facets: Node pairs (F, 2).
        pressure: Scalar or per-facet pressure in Pa.

    Returns:
        Nodal forces (N, 2) in N.
    """
    n = len(positions)
    if len(facets) == 0:
        return np.zeros((n, 2))
    p = np.broadcast_to(np.asarray(pressure, dtype=float), (len(facets),))
    a, b = positions[facets[:, 0]], positions[facets[:, 1]]
    d = b - a
    area_normal = np.column_stack([-d[:, 1], d[:, 0]])  # |n| = facet length
    coef = -p * 2.0 * math.pi / 6.0
    f_a = (coef * (2.0 * a[:, 0] + b[:, 0]))[:, None] * area_normal
    f_b = (coef * (a[:, 0] + 2.0 * b[:, 0]))[:, None] * area_normal
    idx = facets.ravel()
    out = np.zeros((n, 2))
    vals = np.stack([f_a, f_b], axis=1).reshape(-1, 2)
    out[:, 0] = np.bincount(idx, vals[:, 0], minlength=n)
    out[:, 1] = np.bincount(idx, vals[:, 1], minlength=n)
    return out


def apply_traction(
    mesh: LagrangianMesh,
    facet_set: str,
    pressure: ArrayLike,
    positions: NDArray[np.float64] | None = None,
) -> NDArray[np.float64]:
    """Nodal forces of a pressure on a named facet set.

    Args:
        mesh: Solid mesh.
        facet_set: Name of the facet set, e.g. "outer_top_hemisphere".
        pressure: Scalar or per-facet pressure in Pa.
        positions: Current coordinates; reference coordinates when omitted.

    Returns:
        Nodal forces (N, 2).

    Raises:
        KeyError: If the facet set does not exist.
    """
    facets = mesh.facets(facet_set)
    return traction_forces(mesh.nodes if positions is None else positions, facets, pressure)


def central_difference_step(
    state: SolidState,
    force: NDArray[np.float64],
    mass: NDArray[np.float64],
    dt: float,
    fixed: NDArray[np.bool_] | None = None,
    damping: float = 0.0,
) -> SolidState:
    """Advance velocities by a full step and displacements by the new velocity.

    Args:
        state: Current state (velocities live at the half step).
        force: Net nodal force (N, 2).
        mass: Lumped nodal masses (N,).
        dt: Time step in s.
        fixed: Held DOFs (N, 2); these stay at zero displacement and velocity.
        damping: Mass-proportional damping coefficient in 1/s.

    Returns:
        New SolidState; stress and energies are carried over unchanged.

    Raises:
        SimulationAborted: If the force vector holds a NaN or infinity.
    """
    if not np.all(np.isfinite(force)):
        bad = int(np.flatnonzero(~np.isfinite(force).all(axis=1))[0])
        raise SimulationAborted(
            f"Non-finite nodal force at node {bad}",
            diagnostics={"node": bad, "force": force[bad].tolist()},
        )
    accel = force / mass[:, None]
    if damping > 0.0:
        half = 0.5 * damping * dt
        v = (state.v * (1.0 - half) + dt * accel) / (1.0 + half)
    else:
        v = state.v + dt * accel
    if fixed is not None:
        v[fixed] = 0.0
    u = state.u + dt * v
    if fixed is not None:
        u[fixed] = 0.0
    return replace(state, u=u, v=v)


def element_areas(coords: NDArray[np.float64]) -> NDArray[np.float64]:
    """Planar (r, z) areas of quads, shape (E,)."""
    r, z = coords[..., 0], coords[..., 1]
    return 0.5 * np.abs(
        (r[:, 0] - r[:, 2]) * (z[:, 1] - z[:, 3]) - (r[:, 1] - r[:, 3]) * (z[:, 0] - z[:, 2])
    )


def solid_stable_dt(
    model: SolidModel, positions: NDArray[np.float64] | None = None
) -> float:
    """Smallest element transit time of the dilatational wave.

    Characteristic length is element area over its longest diagonal. The
    safety factor is applied by the caller.

    Args:
        model: Precomputed element operators.
        positions: Current coordinates; reference coordinates when omitted.

    Returns:
        Stable time step in s.
    """
    coords = model.mesh.element_coords(positions)
    diag = np.maximum(
        np.linalg.norm(coords[:, 2] - coords[:, 0], axis=1),
        np.linalg.norm(coords[:, 3] - coords[:, 1], axis=1),
    )
    length = element_areas(coords) / diag
    return float(np.min(length / model.wave_speed))


def kinetic_energy(mass: NDArray[np.float64], v: NDArray[np.float64]) -> float:
    """½ Σ m |v|²."""
    return 0.5 * float(np.sum(mass[:, None] * v * v))
