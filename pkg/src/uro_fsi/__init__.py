"""uro-fsi: axisymmetric bladder and urethra fluid-structure simulation."""

from uro_fsi.config import ScenarioConfig, get_config, load_config, save_config
from uro_fsi.driver import probe_pressure, pulse_value, run
from uro_fsi.export.clinical import compare_to_clinical
from uro_fsi.models import ClinicalReference, ProbeSeries, RunReport
from uro_fsi.scenario import capacity_to_radius, preset, validate

__version__ = "0.1.0"

__all__ = [
    # Core functions
    "run",
    "preset",
    "validate",
    "pulse_value",
    "probe_pressure",
    "compare_to_clinical",
    "capacity_to_radius",
    # Models
    "ScenarioConfig",
    "ProbeSeries",
    "RunReport",
    "ClinicalReference",
    # Config
    "get_config",
    "load_config",
    "save_config",
    # Version
    "__version__",
]
