"""Unit conversion and small geometry helpers for uro-fsi."""

from __future__ import annotations

import math

MM = 1e-3  # m
MS = 1e-3  # s
CM3 = 1e-6  # m³
CMH2O = 98.0665  # Pa


def mm_to_m(value: float) -> float:
    """Convert millimetres to metres."""
    return value * MM


def m_to_mm(value: float) -> float:
    """Convert metres to millimetres."""
    return value / MM


def ms_to_s(value: float) -> float:
    """Convert milliseconds to seconds."""
    return value * MS


def s_to_ms(value: float) -> float:
    """Convert seconds to milliseconds."""
    return value / MS


def cmh2o_to_pa(value: float) -> float:
    """Convert centimetres of water to pascals."""
    return value * CMH2O


def sphere_volume(radius: float) -> float:
    """Volume of a sphere, in the cube of the radius unit."""
    return 4.0 / 3.0 * math.pi * radius**3


def cap_volume(radius: float, z: float) -> float:
    """Volume of the part of a centred sphere below the plane at height z.

    Args:
        radius: Sphere radius.
        z: Plane height relative to the centre, clamped to [-radius, radius].

    Returns:
        Cap volume in the cube of the radius unit.
    """
    z = min(max(z, -radius), radius)
    h = radius + z
    return math.pi * h * h * (3.0 * radius - h) / 3.0


def truncate_decimals(value: float, ndigits: int = 0) -> float:
    """Drop digits beyond ``ndigits`` decimals, toward zero (1.26 -> 1.2)."""
    scale = 10.0**ndigits
    # the small nudge keeps 1.3 from becoming 1.2999... -> 1.2
    return math.copysign(math.floor(abs(value) * scale + 1e-9) / scale, value)
