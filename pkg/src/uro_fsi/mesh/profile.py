"""Axisymmetric (r, z) profile of bladder, urethra and support.

The bladder wall and the urethra form one strip whose mid-curve runs from
the top pole down the sphere, around a circular neck fillet, and down the
tube. The sphere centre is the origin; lengths are in mm.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from uro_fsi.config import ScenarioConfig
from uro_fsi.errors import GeometryError
from uro_fsi.scenario import capacity_to_radius

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportSection:
    """Rectangular section of the annular support plate (mm)."""

    r_inner: float
    r_outer: float
    z_top: float
    thickness: float

    @property
    def z_bottom(self) -> float:
        return self.z_top - self.thickness


@dataclass(frozen=True)
class AxisymProfile:
    """Geometry of the wall strip and the optional support plate (mm)."""

    bladder_radius: float  # inner radius R
    wall_thickness: float
    outlet_angle: float  # polar angle of the sphere/fillet tangent point
    fillet_center: tuple[float, float]
    fillet_radius: float
    fillet_start_angle: float  # direction angle about the fillet centre
    urethra_inner_radius: float
    urethra_wall_thickness: float
    urethra_length: float
    support: SupportSection | None = None

    @property
    def mid_radius(self) -> float:
        """Radius of the sphere mid-surface."""
        return self.bladder_radius + 0.5 * self.wall_thickness

    @property
    def tube_mid_radius(self) -> float:
        return self.urethra_inner_radius + 0.5 * self.urethra_wall_thickness

    @property
    def tube_top_z(self) -> float:
        """Height where the fillet hands over to the straight tube."""
        return self.fillet_center[1]

    @property
    def tube_bottom_z(self) -> float:
        return self.tube_top_z - self.urethra_length

    @property
    def arc_length(self) -> float:
        return self.mid_radius * self.outlet_angle

    @property
    def upper_arc_length(self) -> float:
        """Mid-curve length from the top pole to the equator."""
        return self.mid_radius * 0.5 * math.pi

    @property
    def fillet_length(self) -> float:
        return self.fillet_radius * (math.pi - self.fillet_start_angle)

    @property
    def total_length(self) -> float:
        return self.arc_length + self.fillet_length + self.urethra_length

    def sample(
        self, s: ArrayLike
    ) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """Evaluate the mid-curve at arc-length positions.

        Args:
            s: Arc length from the top pole, in [0, total_length].

        Returns:
            (points, tangents, thickness): points and unit tangents of shape
            (n, 2) and the local wall thickness of shape (n,).
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        points = np.empty((s.size, 2))
        tangents = np.empty((s.size, 2))
        thickness = np.empty(s.size)

        l_arc = self.arc_length
        l_fil = self.fillet_length
        on_arc = s <= l_arc
        on_fillet = (s > l_arc) & (s <= l_arc + l_fil)
        on_tube = s > l_arc + l_fil

        theta = s[on_arc] / self.mid_radius
        points[on_arc] = self.mid_radius * np.column_stack([np.sin(theta), np.cos(theta)])
        tangents[on_arc] = np.column_stack([np.cos(theta), -np.sin(theta)])
        thickness[on_arc] = self.wall_thickness

        frac = (s[on_fillet] - l_arc) / l_fil if l_fil > 0 else np.zeros(0)
        beta = self.fillet_start_angle + (s[on_fillet] - l_arc) / self.fillet_radius
        cr, cz = self.fillet_center
        points[on_fillet] = np.column_stack(
            [cr + self.fillet_radius * np.cos(beta), cz + self.fillet_radius * np.sin(beta)]
        )
        tangents[on_fillet] = np.column_stack([-np.sin(beta), np.cos(beta)])
        thickness[on_fillet] = self.wall_thickness + frac * (
            self.urethra_wall_thickness - self.wall_thickness
        )

        depth = s[on_tube] - l_arc - l_fil
        points[on_tube] = np.column_stack(
            [np.full(depth.size, self.tube_mid_radius), self.tube_top_z - depth]
        )
        tangents[on_tube] = np.array([0.0, -1.0])
        thickness[on_tube] = self.urethra_wall_thickness

        return points, tangents, thickness

    def bladder_mid_surface(self, n: int = 181) -> NDArray[np.float64]:
        """Polyline of the sphere mid-surface from the top pole to the neck."""
        points, _, _ = self.sample(np.linspace(0.0, self.arc_length, n))
        return points


def build_profile(config: ScenarioConfig) -> AxisymProfile:
    """Build the (r, z) profile of one scenario.

    Args:
        config: Scenario; assumed to pass validate().

    Returns:
        AxisymProfile with the bladder centred on the axis at the origin.

    Raises:
        GeometryError: If the urethra is too wide for the bladder opening or
            the neck fillet cannot hold the wall.
    """
    radius = capacity_to_radius(config.bladder_capacity)
    t = config.bladder_wall_thickness
    t_u = config.urethra_wall_thickness
    rho_m = radius + 0.5 * t
    r_um = config.urethra_inner_radius + 0.5 * t_u
    rho_f = config.outlet_fillet_radius

    if rho_f <= 0.5 * max(t, t_u):
        raise GeometryError(
            f"Outlet fillet radius {rho_f} mm cannot hold a wall of {max(t, t_u)} mm"
        )
    sin_theta = (r_um + rho_f) / (rho_m + rho_f)
    if sin_theta >= 1.0:
        raise GeometryError(
            f"Urethra (mid radius {r_um:.3f} mm) is wider than the bladder opening "
            f"(mid radius {rho_m:.3f} mm)"
        )

    # Outlet lies on the lower half, so the polar angle is past the equator
    theta1 = math.pi - math.asin(sin_theta)
    centre = ((rho_m + rho_f) * math.sin(theta1), (rho_m + rho_f) * math.cos(theta1))
    beta1 = math.atan2(-math.cos(theta1), -math.sin(theta1))

    support = None
    if config.support_present:
        r_inner = config.urethra_inner_radius + t_u + config.support_clearance
        support = SupportSection(
            r_inner=r_inner,
            r_outer=config.support_radius,
            z_top=centre[1],
            thickness=config.support_thickness,
        )
        if support.r_outer <= support.r_inner:
            raise GeometryError(
                f"Support outer radius {support.r_outer} mm does not clear the urethra "
                f"({support.r_inner:.3f} mm)"
            )

    profile = AxisymProfile(
        bladder_radius=radius,
        wall_thickness=t,
        outlet_angle=theta1,
        fillet_center=centre,
        fillet_radius=rho_f,
        fillet_start_angle=beta1,
        urethra_inner_radius=config.urethra_inner_radius,
        urethra_wall_thickness=t_u,
        urethra_length=config.urethra_length,
        support=support,
    )
    logger.debug(
        f"Profile: R={radius:.3f} mm, outlet angle={math.degrees(theta1):.2f} deg, "
        f"tube top z={profile.tube_top_z:.3f} mm, support={'yes' if support else 'no'}"
    )
    return profile
