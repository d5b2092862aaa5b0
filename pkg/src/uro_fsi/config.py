"""Scenario configuration models and YAML loader for uro-fsi.

Values are stored in the units a clinician or modeller writes them in:
lengths in mm, bladder capacity in cm³, times in ms, pressures and moduli
in Pa, densities in kg/m³. The solvers convert to SI once per run.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

Condition = Literal["physiological", "pathological"]
PulseShape = Literal["triangle", "half_sine"]


class PulseSpec(BaseModel):
    """Abdominal pressure pulse applied to the top hemisphere."""

    hold_end: float = 10.0  # ms, pulse is zero until here
    peak_time: float = 105.0  # ms
    end_time: float = 200.0  # ms
    peak_pressure: float = 4900.0  # Pa, 50 cmH2O
    shape: PulseShape = "triangle"


class LinearElastic(BaseModel):
    """Isotropic linear-elastic tissue."""

    E: float
    nu: float = 0.45
    rho: float = 1030.0


class PolynomialEOS(BaseModel):
    """Polynomial equation of state for urine.

    Coefficients are in Pa. The tabulated constants (2.2e6, 9.54e6, 1.45e6)
    are read as kPa, which gives the 2.2 GPa bulk modulus of water.
    """

    A1: float = 2.2e9
    A2: float = 9.54e9
    A3: float = 1.45e9
    B0: float = 0.28
    B1: float = 0.28
    rho0: float = 1000.0
    tension_cutoff: float = -1000.0


class MaterialSet(BaseModel):
    """Tissue and urine properties."""

    bladder: LinearElastic = Field(default_factory=lambda: LinearElastic(E=0.05e6))
    urethra: LinearElastic = Field(default_factory=lambda: LinearElastic(E=3.0e6))
    support: LinearElastic = Field(default_factory=lambda: LinearElastic(E=1.2e6))  # pelvic floor
    urine: PolynomialEOS = Field(default_factory=PolynomialEOS)


class MeshSettings(BaseModel):
    """Resolution of the Lagrangian mesh and the Eulerian grid."""

    # None derives the count from the element size
    solid_elements_through_thickness: int | None = 3
    target_solid_element_size: float = 1.5  # mm
    fluid_cell_size: float = 1.0  # mm
    domain_margin: float = 0.25  # fraction of the solid bounding box added on each side

    @classmethod
    def fine(cls) -> MeshSettings:
        """Resolution giving roughly 32,400 solid elements for the physiological preset."""
        return cls(solid_elements_through_thickness=None, target_solid_element_size=0.13)


class SolverSettings(BaseModel):
    """Explicit time-loop controls."""

    cfl_safety: float = 0.65
    energy_error_tolerance: float = 0.04
    contact_gap_tolerance: float = 0.2  # fraction of the local element size
    penalty_stiffness_scale: float = 100.0
    end_time: float = 200.0  # ms
    output_interval: float = 1.0  # ms
    mass_damping: float = 0.0  # 1/s
    energy_floor: float = 1e-6  # J
    max_steps: int | None = None


class ScenarioConfig(BaseModel):
    """Full parametric description of one run."""

    condition: Condition = "physiological"

    # Bladder
    bladder_capacity: float = 410.0  # cm³
    bladder_wall_thickness: float = 1.5  # mm
    outlet_fillet_radius: float = 3.0  # mm

    # Urethra
    urethra_length: float = 20.0  # mm
    urethra_inner_radius: float = 2.0  # mm
    urethra_wall_thickness: float = 1.5  # mm

    # Support structure (pelvic floor)
    support_present: bool = True
    support_radius: float = 131.0  # mm
    support_thickness: float = 2.0  # mm
    support_clearance: float = 0.1  # mm

    # Filling
    fill_fraction: float = 0.9
    initial_vesical_pressure: float = 2062.0  # Pa

    pulse: PulseSpec = Field(default_factory=PulseSpec)
    materials: MaterialSet = Field(default_factory=MaterialSet)
    mesh: MeshSettings = Field(default_factory=MeshSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)

    # Bladder-centre probe, (r, z) in mm relative to the sphere centre
    probe_point: tuple[float, float] = (0.0, 0.0)

    @property
    def eos(self) -> PolynomialEOS:
        """Urine equation of state."""
        return self.materials.urine


_config: ScenarioConfig | None = None


def find_config_file() -> Path | None:
    """Find a scenario file by searching multiple locations.

    Search order (first found wins):
    1. URO_FSI_CONFIG environment variable
    2. Current working directory: ./scenario.yaml
    3. User home directory: ~/.uro-fsi/scenario.yaml

    Returns:
        Path to scenario file if found, None otherwise.
    """
    env_path = os.environ.get("URO_FSI_CONFIG")
    if env_path:
        path = Path(env_path).expanduser()
        if path.exists():
            return path
        logger.warning(f"URO_FSI_CONFIG path does not exist: {env_path}")

    cwd_config = Path("scenario.yaml")
    if cwd_config.exists():
        return cwd_config.resolve()

    home_config = Path.home() / ".uro-fsi" / "scenario.yaml"
    if home_config.exists():
        return home_config

    return None


def load_config(config_path: str | Path | None = None) -> ScenarioConfig:
    """Load a scenario from a YAML file.

    Args:
        config_path: Path to scenario file. If None, searches the default
                    locations (see find_config_file).

    Returns:
        ScenarioConfig with the loaded settings; defaults when no file exists.
    """
    global _config

    config_path = Path(config_path).expanduser() if config_path is not None else find_config_file()

    if config_path is not None and config_path.exists():
        logger.debug(f"Loading scenario from: {config_path}")
        with open(config_path) as f:
            data: dict[str, Any] = yaml.safe_load(f) or {}
        _config = ScenarioConfig(**data)
    else:
        logger.debug("No scenario file found, using defaults")
        _config = ScenarioConfig()

    return _config


def save_config(config: ScenarioConfig, path: str | Path) -> Path:
    """Write a scenario to YAML.

    Args:
        config: Scenario to write.
        path: Destination file; parent directories are created.

    Returns:
        The written path.
    """
    path = Path(path).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    data = config.model_dump(mode="json")
    with open(path, "w") as f:
        yaml.safe_dump(data, f, sort_keys=False)
    logger.debug(f"Saved scenario to: {path}")
    return path


def get_config() -> ScenarioConfig:
    """Get the current scenario, loading if necessary."""
    global _config
    if _config is None:
        return load_config()
    return _config


def reset_config() -> None:
    """Reset the cached scenario."""
    global _config
    _config = None
