"""Result export for uro-fsi.

Supports the probe trace as CSV, solid and fluid snapshots as legacy ASCII
VTK, and the run report as JSON. Lengths are written in mm.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import NDArray

from uro_fsi.errors import DomainError
from uro_fsi.models import ProbeSeries, RunReport
from uro_fsi.utils import m_to_mm

if TYPE_CHECKING:
    from uro_fsi.driver import FieldSnapshot

logger = logging.getLogger(__name__)

CSV_HEADER = "time_ms,pressure_Pa"
VTK_QUAD = 9


def _numbers(values: NDArray[Any], per_line: int) -> str:
    """Rows of space-separated values, shortest round-trip float repr."""
    flat = np.asarray(values).reshape(-1, per_line).tolist()
    return "\n".join(" ".join(repr(v) for v in row) for row in flat)


class ResultFormatter(ABC):
    """Abstract base class for result formatters."""

    name: str = "base"
    file_extension: str = ".txt"

    @abstractmethod
    def format(self, item: Any) -> str:
        """Render one result object as text.

        Args:
            item: Object to format.

        Returns:
            File content.
        """
        ...

    def to_file(self, item: Any, path: str | Path) -> Path:
        """Write a result object to a file with LF line endings.

        Args:
            item: Object to format.
            path: Output file path; parent directories are created.

        Returns:
            Path to the written file.
        """
        content = self.format(item)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8", newline="\n")
        logger.debug(f"Wrote {self.name} output to {path}")
        return path


class ProbeCSVFormatter(ResultFormatter):
    """Probe trace as `time_ms,pressure_Pa` rows."""

    name = "csv"
    file_extension = ".csv"

    def format(self, item: ProbeSeries) -> str:
        if len(item) == 0:
            raise DomainError("Cannot export an empty probe series")
        rows = [CSV_HEADER]
        rows.extend(f"{float(t)!r},{float(p)!r}" for t, p in zip(item.t, item.p))
        return "\n".join(rows) + "\n"


class SolidVTKFormatter(ResultFormatter):
    """Solid mesh as an unstructured quad grid with nodal displacement in mm."""

    name = "vtk-solid"
    file_extension = ".vtk"

    def format(self, item: FieldSnapshot) -> str:
        mesh = item.mesh
        u = np.asarray(item.displacement, dtype=float)
        if u.shape != (mesh.n_nodes, 2):
            raise DomainError(
                f"Displacement shape {u.shape} does not match {mesh.n_nodes} mesh nodes"
            )
        n, e = mesh.n_nodes, mesh.n_elements
        points = np.column_stack([mesh.nodes_mm(), np.zeros(n)])
        disp = np.column_stack([u * 1e3, np.zeros(n)])
        cells = np.column_stack([np.full(e, 4), mesh.elements])
        return "\n".join(
            [
                "# vtk DataFile Version 3.0",
                f"uro-fsi solid {item.label} t={item.time!r} ms",
                "ASCII",
                "DATASET UNSTRUCTURED_GRID",
                f"POINTS {n} double",
                _numbers(points, 3),
                f"CELLS {e} {5 * e}",
                _numbers(cells, 5),
                f"CELL_TYPES {e}",
                _numbers(np.full(e, VTK_QUAD), 1),
                f"CELL_DATA {e}",
                "SCALARS material int 1",
                "LOOKUP_TABLE default",
                _numbers(mesh.material, 1),
                f"POINT_DATA {n}",
                "VECTORS displacement double",
                _numbers(disp, 3),
            ]
        ) + "\n"


class FluidVTKFormatter(ResultFormatter):
    """Euler grid as structured points with cell pressure, open fraction and status."""

    name = "vtk-fluid"
    file_extension = ".vtk"

    def format(self, item: FieldSnapshot) -> str:
        grid = item.grid
        fields = {"pressure": item.pressure, "open_fraction": item.phi, "status": item.status}
        for key, values in fields.items():
            if np.shape(values) != grid.shape:
                raise DomainError(f"Field {key} has shape {np.shape(values)}, grid is {grid.shape}")

        def block(name: str, kind: str, values: NDArray[Any]) -> list[str]:
            # VTK orders cells with x (here r) varying fastest
            return [f"SCALARS {name} {kind} 1", "LOOKUP_TABLE default", _numbers(values.T, 1)]

        return "\n".join(
            [
                "# vtk DataFile Version 3.0",
                f"uro-fsi fluid {item.label} t={item.time!r} ms",
                "ASCII",
                "DATASET STRUCTURED_POINTS",
                f"DIMENSIONS {grid.nr + 1} {grid.nz + 1} 1",
                f"ORIGIN 0.0 {m_to_mm(grid.z0)!r} 0.0",
                f"SPACING {m_to_mm(grid.dr)!r} {m_to_mm(grid.dz)!r} 1.0",
                f"CELL_DATA {grid.nr * grid.nz}",
                *block("pressure", "double", np.asarray(item.pressure, dtype=float)),
                *block("open_fraction", "double", np.asarray(item.phi, dtype=float)),
                *block("status", "int", np.asarray(item.status, dtype=int)),
            ]
        ) + "\n"


class ReportJSONFormatter(ResultFormatter):
    """Run report as indented JSON."""

    name = "json"
    file_extension = ".json"

    def format(self, item: RunReport) -> str:
        return item.model_dump_json(indent=2) + "\n"


FORMATTERS: dict[str, type[ResultFormatter]] = {
    "csv": ProbeCSVFormatter,
    "vtk-solid": SolidVTKFormatter,
    "vtk-fluid": FluidVTKFormatter,
    "json": ReportJSONFormatter,
}


def get_formatter(format: str) -> ResultFormatter:
    """Get a formatter instance by name.

    Args:
        format: Format name (csv, vtk-solid, vtk-fluid, json).

    Returns:
        Formatter instance.

    Raises:
        ValueError: If format is not supported.
    """
    format_lower = format.lower()
    if format_lower not in FORMATTERS:
        available = ", ".join(FORMATTERS.keys())
        raise ValueError(f"Unknown format: {format}. Available: {available}")
    return FORMATTERS[format_lower]()


def export_csv(series: ProbeSeries, path: str | Path) -> Path:
    """Write a probe trace as CSV."""
    return ProbeCSVFormatter().to_file(series, path)


def export_vtk(snapshot: FieldSnapshot, directory: str | Path) -> list[Path]:
    """Write the solid and fluid VTK files of one snapshot.

    Args:
        snapshot: Fields to write.
        directory: Output directory.

    Returns:
        Paths of the solid and fluid files.
    """
    directory = Path(directory)
    return [
        SolidVTKFormatter().to_file(snapshot, directory / f"solid_{snapshot.label}.vtk"),
        FluidVTKFormatter().to_file(snapshot, directory / f"fluid_{snapshot.label}.vtk"),
    ]


def read_csv(path: str | Path) -> ProbeSeries:
    """Load a probe trace written by export_csv."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise DomainError(f"{path} is not a probe CSV file")
    series = ProbeSeries(point=(0.0, 0.0))
    for line in lines[1:]:
        t, p = line.split(",")
        series.append(float(t), float(p))
    return series


def write_run_outputs(
    output_dir: str | Path,
    series: ProbeSeries,
    snapshots: list[FieldSnapshot],
    report: RunReport,
) -> list[Path]:
    """Write probe.csv, report.json and one solid/fluid VTK pair per snapshot.

    Returns:
        All written paths.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if len(series):
        written.append(export_csv(series, output_dir / "probe.csv"))
    for snap in snapshots:
        written.extend(export_vtk(snap, output_dir))
    written.append(ReportJSONFormatter().to_file(report, output_dir / "report.json"))
    logger.info(f"Wrote {len(written)} files to {output_dir}")
    return written


def read_report(path: str | Path) -> RunReport:
    """Load a report written by write_run_outputs."""
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))
