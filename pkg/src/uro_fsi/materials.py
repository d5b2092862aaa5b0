"""Constitutive models: linear-elastic tissue and the polynomial urine EOS.

Axisymmetric tensors are stored as 4-vectors in the order
(rr, zz, θθ, rz); strains carry the engineering shear γrz.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from uro_fsi.config import LinearElastic, PolynomialEOS
from uro_fsi.errors import DomainError


def lame_parameters(mat: LinearElastic) -> tuple[float, float]:
    """Return (λ, G) for a linear-elastic material."""
    lam = mat.E * mat.nu / ((1.0 + mat.nu) * (1.0 - 2.0 * mat.nu))
    shear = mat.E / (2.0 * (1.0 + mat.nu))
    return lam, shear


def bulk_modulus(mat: LinearElastic) -> float:
    """K = E / (3(1 - 2ν))."""
    return mat.E / (3.0 * (1.0 - 2.0 * mat.nu))


def constrained_modulus(mat: LinearElastic) -> float:
    """P-wave modulus M = E(1 - ν) / ((1 + ν)(1 - 2ν))."""
    return mat.E * (1.0 - mat.nu) / ((1.0 + mat.nu) * (1.0 - 2.0 * mat.nu))


def dilatational_wave_speed(mat: LinearElastic) -> float:
    """√(M/ρ); 13.57 m/s for bladder tissue."""
    return math.sqrt(constrained_modulus(mat) / mat.rho)


def elasticity_matrix(mat: LinearElastic) -> NDArray[np.float64]:
    """4×4 axisymmetric Hooke matrix mapping (εrr, εzz, εθθ, γrz) to stress."""
    lam, shear = lame_parameters(mat)
    d = np.zeros((4, 4))
    d[:3, :3] = lam
    d[0, 0] = d[1, 1] = d[2, 2] = lam + 2.0 * shear
    d[3, 3] = shear
    return d


def hooke_stress(strain: ArrayLike, mat: LinearElastic) -> NDArray[np.float64]:
    """Linear-elastic stress for one or many axisymmetric strain vectors.

    Args:
        strain: Array of shape (..., 4) holding (εrr, εzz, εθθ, γrz).
        mat: Material.

    Returns:
        Stress array (σrr, σzz, σθθ, σrz) in Pa with the same leading shape.
    """
    eps = np.asarray(strain, dtype=float)
    if eps.shape[-1] != 4:
        raise ValueError(f"Axisymmetric strain needs 4 components, got shape {eps.shape}")
    return eps @ elasticity_matrix(mat).T


def eos_pressure(mu: ArrayLike, e: ArrayLike, eos: PolynomialEOS) -> NDArray[np.float64]:
    """Polynomial EOS pressure.

    Compression branch (μ ≥ 0): A1μ + A2μ² + A3μ³ + (B0 + B1μ)ρ0e.
    Tension branch (μ < 0): max(A1μ + B0ρ0e, tension_cutoff).

    Args:
        mu: Compression ρ/ρ0 - 1.
        e: Specific internal energy in J/kg.
        eos: Equation-of-state constants.

    Returns:
        Pressure in Pa, broadcast over the inputs.

    Raises:
        DomainError: If any μ ≤ -1 (non-physical density).
    """
    mu = np.asarray(mu, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any(mu <= -1.0):
        raise DomainError(f"Compression must exceed -1, got min {float(np.min(mu))}")
    rho_e = eos.rho0 * e
    compression = (
        eos.A1 * mu + eos.A2 * mu**2 + eos.A3 * mu**3 + (eos.B0 + eos.B1 * mu) * rho_e
    )
    tension = np.maximum(eos.A1 * mu + eos.B0 * rho_e, eos.tension_cutoff)
    return np.where(mu >= 0.0, compression, tension)


def sound_speed(eos: PolynomialEOS, mu: ArrayLike = 0.0) -> NDArray[np.float64] | float:
    """Isentropic-limit sound speed from the cold curve.

    At the reference state this is √(A1/ρ0), 1483.2 m/s for urine.

    Args:
        eos: Equation-of-state constants.
        mu: Compression; tension states use the reference slope.

    Returns:
        Sound speed in m/s (a float for scalar input).
    """
    mu_arr = np.maximum(np.asarray(mu, dtype=float), 0.0)
    slope = eos.A1 + 2.0 * eos.A2 * mu_arr + 3.0 * eos.A3 * mu_arr**2
    c = np.sqrt(slope / eos.rho0)
    return float(c) if c.ndim == 0 else c


def initial_compression(pressure: float, eos: PolynomialEOS) -> float:
    """Compression μ0 = p0/A1 imposed on urine at rest."""
    return pressure / eos.A1
