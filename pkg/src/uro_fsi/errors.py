"""Exception hierarchy for uro-fsi."""

from __future__ import annotations

from typing import Any


class UroFsiError(Exception):
    """Base class for all uro-fsi errors."""


class DomainError(UroFsiError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(UroFsiError, ValueError):
    """A scenario cannot be run as configured."""

    def __init__(self, message: str, violations: list[Any] | None = None):
        super().__init__(message)
        self.violations = list(violations or [])


class GeometryError(UroFsiError, ValueError):
    """The requested profile cannot be built (e.g. tube wider than the opening)."""


class MeshingError(UroFsiError, ValueError):
    """A generated element is degenerate or inverted."""

    def __init__(self, message: str, element_id: int | None = None):
        super().__init__(message)
        self.element_id = element_id


class CouplingError(UroFsiError, ValueError):
    """Fluid/structure containment could not be decided."""

    def __init__(self, message: str, facet_id: int | None = None):
        super().__init__(message)
        self.facet_id = facet_id


class FluidSolverError(UroFsiError, RuntimeError):
    """The Eulerian update produced a non-physical state."""

    def __init__(self, message: str, cell_id: int | None = None):
        super().__init__(message)
        self.cell_id = cell_id


class SimulationAborted(UroFsiError, RuntimeError):
    """The coupled time loop stopped before reaching its end time."""

    def __init__(
        self,
        message: str,
        step: int = 0,
        time: float = 0.0,
        diagnostics: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.step = step
        self.time = time
        self.diagnostics = dict(diagnostics or {})
