"""CLI entry point for uro-fsi."""

from __future__ import annotations

import importlib
import logging
import sys
from pathlib import Path
from typing import Annotated

import typer
import yaml

from uro_fsi.config import MeshSettings, load_config, save_config
from uro_fsi.errors import ConfigurationError, UroFsiError
from uro_fsi.export.clinical import compare_to_clinical, format_comparison
from uro_fsi.export.formats import read_report
from uro_fsi.models import DEFAULT_REFERENCES, ComparisonReport, RunReport
from uro_fsi.scenario import CONDITIONS, preset, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3

# Exception module of the click build typer runs on, vendored or installed.
click_errors = importlib.import_module(typer.Exit.__module__)

app = typer.Typer(
    name="uro-fsi",
    help="Bladder and urethra fluid-structure simulation under an abdominal pressure pulse.",
    no_args_is_help=True,
)


@app.callback()
def main_options(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log debug details")] = False,
) -> None:
    """Configure logging for all commands."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def format_report(report: RunReport) -> str:
    """Format a run report for display.

    Args:
        report: Report to format.

    Returns:
        Formatted string.
    """
    lines = [f"Condition: {report.condition}"]
    if report.aborted:
        lines.append(f"   ABORTED: {report.abort_reason}")
    lines.append(f"   Peak pressure: {report.peak_pressure:.1f} Pa at {report.peak_time:g} ms")
    lines.append(f"   Initial pressure: {report.initial_pressure:.1f} Pa")
    r, z = report.max_displacement_location
    lines.append(f"   Max displacement: {report.max_displacement:.2f} mm at ({r:.1f}, {z:.1f}) mm")
    r, z = report.min_displacement_location
    lines.append(f"   Min bladder displacement: {report.min_displacement:.3f} mm at ({r:.1f}, {z:.1f}) mm")
    lines.append(f"   Max contact penetration: {report.max_penetration:.4f} mm")
    lines.append(f"   Max energy error: {report.max_energy_error:.4f}")
    lines.append(f"   Steps: {report.steps} in {report.wall_clock:.1f} s")
    if report.comparison:
        c = report.comparison
        lines.append(f"   Clinical error: {c.error_percent:.2f}% against {c.real_pressure:.0f} Pa")
    return "\n".join(lines)


@app.command(name="preset")
def preset_cmd(
    condition: Annotated[str, typer.Argument(help="physiological or pathological")],
    output: Annotated[
        Path, typer.Option("--output", "-o", help="Scenario file to write")
    ] = Path("scenario.yaml"),
    fine: Annotated[
        bool, typer.Option("--fine", help="Use the fine (~32,400 element) mesh resolution")
    ] = False,
) -> None:
    """Write a preset scenario file."""
    if condition not in CONDITIONS:
        typer.echo(f"Unknown condition: {condition}. Available: {', '.join(CONDITIONS)}", err=True)
        raise typer.Exit(EXIT_USAGE)
    config = preset(condition, MeshSettings.fine() if fine else None)  # type: ignore[arg-type]
    path = save_config(config, output)
    typer.echo(f"Scenario saved to: {path}")


@app.command(name="run")
def run_cmd(
    config_file: Annotated[Path, typer.Option("--config", "-c", help="Scenario file")],
    output: Annotated[
        Path, typer.Option("--output", "-o", help="Directory for CSV, VTK and report")
    ] = Path("results"),
    end_time: Annotated[
        float | None, typer.Option("--end-time", help="Stop the run early, in ms")
    ] = None,
) -> None:
    """Simulate a scenario and write its results."""
    from uro_fsi.driver import run

    if not config_file.exists():
        typer.echo(f"Error: scenario file not found: {config_file}", err=True)
        raise typer.Exit(EXIT_RUNTIME)
    try:
        config = load_config(config_file)
    except (OSError, ValueError, yaml.YAMLError) as e:
        typer.echo(f"Error: cannot read {config_file}: {e}", err=True)
        raise typer.Exit(EXIT_RUNTIME) from e
    violations = validate(config)
    if violations:
        typer.echo(f"Invalid scenario {config_file}:", err=True)
        for v in violations:
            typer.echo(f"  - {v}", err=True)
        raise typer.Exit(EXIT_RUNTIME)

    try:
        _, _, report = run(config, output, until=end_time)
    except UroFsiError as e:
        typer.echo(f"Run failed: {e}", err=True)
        raise typer.Exit(EXIT_RUNTIME) from e

    typer.echo(format_report(report))
    typer.echo(f"Results saved to: {output}")
    if report.aborted:
        raise typer.Exit(EXIT_RUNTIME)


@app.command()
def verify(
    quick: Annotated[
        bool, typer.Option("--quick", help="Skip the refined and coupled checks")
    ] = False,
    acceptance: Annotated[
        bool,
        typer.Option("--acceptance", help="Also run both presets under load (slow)"),
    ] = False,
) -> None:
    """Run the analytic oracle suite."""
    from uro_fsi.verification.oracles import format_results, run_verification

    results = run_verification(quick=quick, acceptance=acceptance)
    typer.echo(format_results(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        typer.echo(f"\n{len(failed)} check(s) failed: {', '.join(failed)}", err=True)
        raise typer.Exit(EXIT_VERIFY)
    typer.echo(f"\nAll {len(results)} checks passed")


@app.command()
def compare(
    results_dir: Annotated[
        Path | None, typer.Option("--config", "-c", help="Results directory with report.json files")
    ] = None,
    peak: Annotated[
        float | None, typer.Option("--peak", help="Simulated peak pressure in Pa")
    ] = None,
    condition: Annotated[
        str, typer.Option("--condition", help="Condition of --peak")
    ] = "pathological",
) -> None:
    """Compare peak pressures with the clinical cough measurements."""
    comparisons: list[ComparisonReport] = []
    if peak is not None:
        if condition not in DEFAULT_REFERENCES:
            typer.echo(f"Unknown condition: {condition}", err=True)
            raise typer.Exit(EXIT_USAGE)
        comparisons.append(compare_to_clinical(peak, DEFAULT_REFERENCES[condition]))
    if results_dir is not None:
        paths = sorted(Path(results_dir).rglob("report.json"))
        if not paths:
            typer.echo(f"No report.json found under {results_dir}", err=True)
            raise typer.Exit(EXIT_RUNTIME)
        for path in paths:
            report = read_report(path)
            comparisons.append(
                compare_to_clinical(report.peak_pressure, DEFAULT_REFERENCES[report.condition])
            )
    if not comparisons:
        typer.echo("Nothing to compare: give --config or --peak", err=True)
        raise typer.Exit(EXIT_USAGE)
    typer.echo(format_comparison(comparisons))


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code.

    Args:
        argv: Arguments without the program name; sys.argv when omitted.

    Returns:
        0 success, 1 usage error, 2 runtime failure, 3 verification failure.
    """
    args = sys.argv[1:] if argv is None else argv
    try:
        result = app(args=args, prog_name="uro-fsi", standalone_mode=False)
    except click_errors.Exit as e:
        return e.exit_code
    except click_errors.UsageError as e:
        typer.echo(f"Error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except click_errors.ClickException as e:
        typer.echo(f"Error: {e.format_message()}", err=True)
        return EXIT_RUNTIME
    except ConfigurationError as e:
        typer.echo(f"Error: {e}", err=True)
        return EXIT_RUNTIME
    except click_errors.Abort:
        return EXIT_RUNTIME
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
