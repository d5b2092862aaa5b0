"""Scenario presets, capacity conversion and configuration checks."""

from __future__ import annotations

import logging
import math

from uro_fsi.config import (
    Condition,
    LinearElastic,
    MeshSettings,
    ScenarioConfig,
)
from uro_fsi.errors import ConfigurationError, DomainError
from uro_fsi.models import Violation

logger = logging.getLogger(__name__)

CONDITIONS: tuple[Condition, ...] = ("physiological", "pathological")

# Capacity (cm³), support, resting vesical pressure (Pa) per condition.
# Resting pressures are the measured cough peaks minus the 4.9 kPa pulse.
PRESET_VALUES: dict[str, dict[str, float | bool]] = {
    "physiological": {
        "bladder_capacity": 410.0,
        "support_present": True,
        "initial_vesical_pressure": 2062.0,
    },
    "pathological": {
        "bladder_capacity": 346.0,
        "support_present": False,
        "initial_vesical_pressure": 885.0,
    },
}


def capacity_to_radius(capacity: float) -> float:
    """Radius of the sphere holding a given volume.

    Args:
        capacity: Bladder capacity in cm³.

    Returns:
        Radius in mm.

    Raises:
        DomainError: If capacity is not positive.
    """
    if not capacity > 0:
        raise DomainError(f"Bladder capacity must be positive, got {capacity} cm³")
    radius_cm = (3.0 * capacity / (4.0 * math.pi)) ** (1.0 / 3.0)
    return 10.0 * radius_cm


def preset(condition: Condition, mesh: MeshSettings | None = None) -> ScenarioConfig:
    """Build the configuration of one of the two reference models.

    Args:
        condition: "physiological" (supported, 410 cm³) or "pathological"
            (unsupported, 346 cm³).
        mesh: Optional resolution override, e.g. MeshSettings.fine().

    Returns:
        Fully populated ScenarioConfig.

    Raises:
        ConfigurationError: If the condition is unknown.
    """
    if condition not in PRESET_VALUES:
        raise ConfigurationError(
            f"Unknown condition: {condition}. Available: {', '.join(CONDITIONS)}"
        )
    config = ScenarioConfig(condition=condition, **PRESET_VALUES[condition])
    if mesh is not None:
        config = config.model_copy(update={"mesh": mesh.model_copy()})
    return config


def _check_positive(
    violations: list[Violation], config: ScenarioConfig, names: list[str]
) -> None:
    for name in names:
        value = _lookup(config, name)
        if not value > 0:
            violations.append(Violation(field=name, rule=f"must be > 0 (got {value})"))


def _lookup(config: ScenarioConfig, dotted: str) -> float:
    obj: object = config
    for part in dotted.split("."):
        obj = getattr(obj, part)
    return obj  # type: ignore[return-value]


def _check_elastic(violations: list[Violation], name: str, mat: LinearElastic) -> None:
    if not mat.E > 0:
        violations.append(Violation(field=f"materials.{name}.E", rule="must be > 0"))
    if not 0.0 <= mat.nu < 0.5:
        violations.append(Violation(field=f"materials.{name}.nu", rule="must lie in [0, 0.5)"))
    if not mat.rho > 0:
        violations.append(Violation(field=f"materials.{name}.rho", rule="must be > 0"))


def validate(config: ScenarioConfig) -> list[Violation]:
    """Check every scenario invariant.

    Args:
        config: Scenario to check.

    Returns:
        One Violation per broken rule; empty when the scenario can be run.
    """
    violations: list[Violation] = []

    _check_positive(
        violations,
        config,
        [
            "bladder_capacity",
            "bladder_wall_thickness",
            "outlet_fillet_radius",
            "urethra_length",
            "urethra_inner_radius",
            "urethra_wall_thickness",
            "support_radius",
            "support_thickness",
            "mesh.target_solid_element_size",
            "mesh.fluid_cell_size",
            "solver.end_time",
            "solver.output_interval",
            "solver.energy_error_tolerance",
            "solver.contact_gap_tolerance",
            "solver.penalty_stiffness_scale",
        ],
    )

    if not 0.0 < config.fill_fraction <= 1.0:
        violations.append(Violation(field="fill_fraction", rule="must lie in (0, 1]"))
    if config.support_clearance < 0:
        violations.append(Violation(field="support_clearance", rule="must be >= 0"))
    if config.initial_vesical_pressure < 0:
        violations.append(Violation(field="initial_vesical_pressure", rule="must be >= 0"))

    # Pulse timing
    pulse = config.pulse
    if pulse.hold_end < 0:
        violations.append(Violation(field="pulse.hold_end", rule="must be >= 0"))
    if not pulse.hold_end < pulse.peak_time:
        violations.append(Violation(field="pulse.peak_time", rule="must follow pulse.hold_end"))
    if not pulse.peak_time < pulse.end_time:
        violations.append(Violation(field="pulse.end_time", rule="must follow pulse.peak_time"))
    if not pulse.end_time <= config.solver.end_time:
        violations.append(
            Violation(field="solver.end_time", rule="must not precede pulse.end_time")
        )
    if pulse.peak_pressure < 0:
        violations.append(Violation(field="pulse.peak_pressure", rule="must be >= 0"))

    # Condition and support
    if config.condition == "pathological" and config.support_present:
        violations.append(
            Violation(field="support_present", rule="pathological model has no support")
        )
    if config.condition == "physiological" and not config.support_present:
        violations.append(
            Violation(field="support_present", rule="physiological model requires support")
        )

    # Solver controls
    if not 0.0 < config.solver.cfl_safety <= 1.0:
        violations.append(Violation(field="solver.cfl_safety", rule="must lie in (0, 1]"))
    if config.solver.mass_damping < 0:
        violations.append(Violation(field="solver.mass_damping", rule="must be >= 0"))

    # Mesh
    nt = config.mesh.solid_elements_through_thickness
    if nt is not None and nt < 1:
        violations.append(
            Violation(field="mesh.solid_elements_through_thickness", rule="must be >= 1")
        )
    if config.mesh.domain_margin < 0:
        violations.append(Violation(field="mesh.domain_margin", rule="must be >= 0"))
    if config.mesh.fluid_cell_size > config.bladder_wall_thickness:
        violations.append(
            Violation(
                field="mesh.fluid_cell_size",
                rule="must not exceed bladder_wall_thickness",
            )
        )

    # Materials
    mats = config.materials
    for name in ("bladder", "urethra", "support"):
        _check_elastic(violations, name, getattr(mats, name))
    if not mats.urine.A1 > 0:
        violations.append(Violation(field="materials.urine.A1", rule="must be > 0"))
    if not mats.urine.rho0 > 0:
        violations.append(Violation(field="materials.urine.rho0", rule="must be > 0"))
    if mats.urine.tension_cutoff > 0:
        violations.append(Violation(field="materials.urine.tension_cutoff", rule="must be <= 0"))

    # Geometry consistency
    if config.bladder_capacity > 0:
        radius = capacity_to_radius(config.bladder_capacity)
        r, z = config.probe_point
        if r < 0 or math.hypot(r, z) >= radius:
            violations.append(Violation(field="probe_point", rule="must lie inside the bladder"))
        tube_outer = config.urethra_inner_radius + config.urethra_wall_thickness
        if tube_outer >= radius:
            violations.append(
                Violation(field="urethra_inner_radius", rule="urethra wider than the bladder")
            )
        if config.support_present and config.support_radius <= tube_outer + config.support_clearance:
            violations.append(
                Violation(field="support_radius", rule="must exceed the urethra outer radius")
            )

    for v in violations:
        logger.debug(f"Scenario violation: {v}")
    return violations


def require_valid(config: ScenarioConfig) -> None:
    """Raise if the scenario breaks any rule.

    Raises:
        ConfigurationError: Listing every violation.
    """
    violations = validate(config)
    if violations:
        summary = "; ".join(str(v) for v in violations)
        raise ConfigurationError(f"Invalid scenario: {summary}", violations)
