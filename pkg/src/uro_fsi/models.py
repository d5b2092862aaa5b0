"""Result and report models for uro-fsi."""

from __future__ import annotations

from pydantic import BaseModel, Field

from uro_fsi.config import Condition


class Violation(BaseModel):
    """A configuration rule that does not hold."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


class ProbeSeries(BaseModel):
    """Time-stamped pressure trace at one point of the fluid grid."""

    point: tuple[float, float]  # (r, z) mm
    t: list[float] = Field(default_factory=list)  # ms
    p: list[float] = Field(default_factory=list)  # Pa
    # True where no valid fluid cell surrounded the probe and the last value was repeated
    stale: list[bool] = Field(default_factory=list)

    def append(self, t: float, p: float, stale: bool = False) -> None:
        """Record one sample; times must be strictly increasing."""
        if self.t and t <= self.t[-1]:
            raise ValueError(f"Probe time {t} ms does not follow {self.t[-1]} ms")
        self.t.append(float(t))
        self.p.append(float(p))
        self.stale.append(bool(stale))

    def peak(self) -> tuple[float, float]:
        """Return (time ms, pressure Pa) of the maximum sample."""
        if not self.p:
            raise ValueError("Probe series is empty")
        i = max(range(len(self.p)), key=self.p.__getitem__)
        return self.t[i], self.p[i]

    def __len__(self) -> int:
        return len(self.t)


class ClinicalReference(BaseModel):
    """Measured vesical pressure during a cough for one condition."""

    condition: Condition
    real_pressure: float  # Pa
    source: str = "urodynamic cough measurement"
    # Values printed alongside the measurement in the reference comparison
    published_simulated: float | None = None
    published_error_percent: float | None = None


DEFAULT_REFERENCES: dict[str, ClinicalReference] = {
    "physiological": ClinicalReference(
        condition="physiological",
        real_pressure=6962.0,
        published_simulated=7070.0,
        published_error_percent=1.3,
    ),
    "pathological": ClinicalReference(
        condition="pathological",
        real_pressure=5785.0,
        published_simulated=5712.0,
        published_error_percent=1.2,
    ),
}


class ComparisonReport(BaseModel):
    """Peak pressure against a clinical reference."""

    condition: Condition
    peak_pressure: float
    real_pressure: float
    error_percent: float  # 2 decimals
    error_percent_one_decimal: float
    published_error_percent: float | None = None
    note: str | None = None


class RunReport(BaseModel):
    """Summary of one coupled run."""

    condition: Condition
    peak_pressure: float = 0.0  # Pa
    peak_time: float = 0.0  # ms
    initial_pressure: float = 0.0  # Pa
    max_displacement: float = 0.0  # mm
    max_displacement_node: int = -1
    max_displacement_location: tuple[float, float] = (0.0, 0.0)  # reference (r, z) mm
    min_displacement: float = 0.0  # mm
    min_displacement_location: tuple[float, float] = (0.0, 0.0)
    max_penetration: float = 0.0  # mm
    energy_error_history: list[float] = Field(default_factory=list)
    urethral_mass_history: list[float] = Field(default_factory=list)  # kg
    steps: int = 0
    wall_clock: float = 0.0  # s
    aborted: bool = False
    abort_reason: str | None = None
    comparison: ComparisonReport | None = None

    @property
    def max_energy_error(self) -> float:
        """Largest audited energy error."""
        return max(self.energy_error_history, default=0.0)


class OracleResult(BaseModel):
    """Outcome of one analytic check."""

    name: str
    computed: float
    reference: float
    relative_error: float
    tolerance: float
    passed: bool
    detail: str = ""

    @classmethod
    def from_values(
        cls,
        name: str,
        computed: float,
        reference: float,
        tolerance: float,
        detail: str = "",
    ) -> OracleResult:
        """Build a result, deriving the relative error and pass flag."""
        scale = abs(reference) if reference != 0 else 1.0
        rel = abs(computed - reference) / scale
        return cls(
            name=name,
            computed=computed,
            reference=reference,
            relative_error=rel,
            tolerance=tolerance,
            passed=bool(rel <= tolerance),
            detail=detail,
        )
