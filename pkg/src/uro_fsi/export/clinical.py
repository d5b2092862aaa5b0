"""Comparison of simulated peak pressure with urodynamic measurements."""

from __future__ import annotations

from uro_fsi.errors import DomainError
from uro_fsi.models import ClinicalReference, ComparisonReport
from uro_fsi.utils import truncate_decimals


def error_percent(peak: float, real: float) -> float:
    """100 · |peak - real| / real, unrounded."""
    if real <= 0:
        raise DomainError(f"Clinical pressure must be positive, got {real}")
    return 100.0 * abs(peak - real) / real


def compare_to_clinical(peak: float, reference: ClinicalReference) -> ComparisonReport:
    """Relative error of a simulated peak against the clinical value.

    The two-decimal figure is rounded; the one-decimal figure is truncated,
    which is how the reference table prints its pathological row.

    Args:
        peak: Simulated peak vesical pressure in Pa.
        reference: Clinical measurement.

    Returns:
        ComparisonReport.

    Raises:
        DomainError: If the clinical pressure is not positive.
    """
    exact = error_percent(peak, reference.real_pressure)
    two = round(exact, 2)
    one = truncate_decimals(exact, 1)

    note = None
    published = reference.published_error_percent
    if published is not None and not abs(one - published) < 1e-9:
        note = (
            f"published error {published}% differs from "
            f"|{peak:g} - {reference.real_pressure:g}| / {reference.real_pressure:g} = {two}%"
        )
    return ComparisonReport(
        condition=reference.condition,
        peak_pressure=peak,
        real_pressure=reference.real_pressure,
        error_percent=two,
        error_percent_one_decimal=one,
        published_error_percent=published,
        note=note,
    )


def format_comparison(reports: list[ComparisonReport]) -> str:
    """Plain-text table with one row per condition."""
    header = f"{'condition':<14} {'real Pa':>9} {'simulated Pa':>13} {'error %':>8} {'(1 dp)':>7} {'published %':>12}"
    lines = [header, "-" * len(header)]
    for r in reports:
        published = "-" if r.published_error_percent is None else f"{r.published_error_percent:g}"
        lines.append(
            f"{r.condition:<14} {r.real_pressure:>9.0f} {r.peak_pressure:>13.1f} "
            f"{r.error_percent:>8.2f} {r.error_percent_one_decimal:>7.1f} {published:>12}"
        )
    lines.extend(f"note ({r.condition}): {r.note}" for r in reports if r.note)
    return "\n".join(lines)
