"""Result files and clinical comparison."""

from uro_fsi.export.clinical import compare_to_clinical, error_percent, format_comparison
from uro_fsi.export.formats import (
    FORMATTERS,
    export_csv,
    export_vtk,
    get_formatter,
    read_csv,
    read_report,
    write_run_outputs,
)

__all__ = [
    "FORMATTERS",
    "compare_to_clinical",
    "error_percent",
    "export_csv",
    "export_vtk",
    "format_comparison",
    "get_formatter",
    "read_csv",
    "read_report",
    "write_run_outputs",
]
