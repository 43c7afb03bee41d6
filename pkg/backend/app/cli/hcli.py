# Command Line Interface
# File: hcli.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: hcli entry point: distances, minimal curves, the (P_eps) pipeline and diagnostic suites

"""
Usage (from backend/):

    python -m app.cli.hcli dist 0 0 0 -- 1 0 0
    python -m app.cli.hcli geod 0 0 0 -- 1 0 1 --steps 20
    python -m app.cli.hcli pipeline --nu nu.json --eps 0.5,0.1 --out runs/demo
    python -m app.cli.hcli verify geometry --seed 7

Coordinates are flat lists (xi..., eta..., t); the two points of dist and geod
are the two halves of the list. Exit codes: 0 success, 1 invalid input,
2 solver failure, 3 failed checks.
"""

import functools
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import click
import pandas as pd
from rich.console import Console
from rich.table import Table

from app.core.config import settings
from app.core.exceptions import InvalidInputError, SolverError
from app.diagnostics.reports import CheckReport
from app.heisenberg.distance import cc_distance
from app.heisenberg.geodesics import curve_rows, minimal_curve
from app.heisenberg.group import Point
from app.schemas.documents import MeasureDocument, PlanDocument, ReportsDocument, RunConfig, SourceDocument
from app.services import io_service
from app.services.pipeline_service import default_source, default_target, run_pipeline
from app.services.verify_service import SUITES, check_plan_document, run_suite, summary_frame
from app.utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_CHECKS = 3

# negative coordinates must reach the command as arguments
_COORDINATE_CONTEXT = {"ignore_unknown_options": True}

err_console = Console(stderr=True)


def handle_errors(command: Callable) -> Callable:
    """Map toolkit exceptions onto exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except SolverError as exc:
            stage = exc.stage or "solver"
            err_console.print(f"[red]solver failure in stage {stage}:[/red] {exc}")
            sys.exit(EXIT_SOLVER)
        except ValueError as exc:
            err_console.print(f"[red]invalid input:[/red] {exc}")
            sys.exit(EXIT_INVALID)

    return wrapper


def parse_points(values: Sequence[str]) -> Tuple[Point, Point]:
    """
    Split a flat coordinate list into two points of H^n.

    Raises:
        InvalidInputError: on non-numeric values or a length other than 2(2n+1)
    """
    coords = [v for v in values if v != "--"]
    try:
        numbers = [float(v) for v in coords]
    except ValueError as exc:
        raise InvalidInputError(f"coordinates must be real numbers: {exc}") from exc
    half, odd = divmod(len(numbers), 2)
    if odd or half < 3 or half % 2 == 0:
        raise InvalidInputError(f"expected two points of 2n+1 coordinates each, got {len(numbers)} values")
    return Point.from_array(numbers[:half]), Point.from_array(numbers[half:])


def parse_epsilons(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"--eps expects comma separated numbers, got {text!r}") from exc


def report_table(reports: List[CheckReport], title: str) -> Table:
    table = Table(title=title)
    for column in ("check", "result", "trials", "violations", "worst", "tolerance"):
        table.add_column(column, justify="right" if column not in ("check", "result") else "left")
    for r in reports:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        kind = " (stat)" if r.statistical else ""
        table.add_row(r.name + kind, verdict, str(r.trials), str(r.violations), f"{r.worst_violation:.3g}", f"{r.tolerance:.3g}")
    return table


def _finish_checks(reports: List[CheckReport]) -> None:
    failed = [r.name for r in reports if not r.passed]
    if failed:
        err_console.print(f"[red]failed checks:[/red] {', '.join(failed)}")
        sys.exit(EXIT_CHECKS)


@click.group()
def cli():
    """Optimal transport toolkit for the Heisenberg group H^n"""


@cli.command(context_settings=_COORDINATE_CONTEXT)
@click.argument("coords", nargs=-1, required=True)
@handle_errors
def dist(coords: Tuple[str, ...]):
    """Carnot-Caratheodory distance between two points"""
    x, y = parse_points(coords)
    # twelve digits after the leading one, whatever the magnitude
    click.echo(str(float(f"{cc_distance(x, y):.12e}")))


@cli.command(context_settings=_COORDINATE_CONTEXT)
@click.argument("coords", nargs=-1, required=True)
@click.option("--steps", type=int, default=16, show_default=True, help="Number of intervals; steps+1 rows")
@click.option("--strict", is_flag=True, help="Fail instead of using the canonical center selection")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV file (stdout when omitted)")
@handle_errors
def geod(coords: Tuple[str, ...], steps: int, strict: bool, out: Optional[str]):
    """Minimal curve from x to y sampled as CSV rows (s, coordinates)"""
    x, y = parse_points(coords)
    if strict and minimal_curve(x, y).canonical_selection:
        raise InvalidInputError("x and y lie on a common center line; the minimal curve is not unique")
    rows, canonical = curve_rows(x, y, steps)
    n = x.n
    columns = ["s"] + [f"xi{j + 1}" for j in range(n)] + [f"eta{j + 1}" for j in range(n)] + ["t"]
    comment = "canonical center selection: endpoints share a center line" if canonical else None
    if out is None:
        click.echo(io_service.format_csv(pd.DataFrame(rows, columns=columns), comment), nl=False)
    else:
        io_service.write_csv(rows, out, columns=columns, header_comment=comment)


@cli.command()
@click.option("--mu", "mu_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Source spec JSON")
@click.option("--nu", "nu_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Target measure JSON")
@click.option("--n", "n", type=int, default=None, help="Group index n of H^n")
@click.option("--seed", type=int, default=None)
@click.option("--eps", "eps", type=str, default=None, help="Decreasing epsilons, e.g. 0.5,0.2,0.1")
@click.option("--samples", type=int, default=None, help="Sample size N of the empirical source")
@click.option("--grid", type=float, default=None, help="Histogram cell side h")
@click.option("--out", type=click.Path(file_okay=False), default=None)
@handle_errors
def pipeline(mu_file, nu_file, n, seed, eps, samples, grid, out):
    """Solve (P_eps) along the epsilon schedule and check the final plan"""
    overrides = {
        "n": n,
        "seed": seed,
        "epsilons": parse_epsilons(eps),
        "N": samples,
        "grid_h": grid,
        "out": out,
    }
    config = RunConfig(**{k: v for k, v in overrides.items() if v is not None})
    source = io_service.load_document(mu_file, SourceDocument) if mu_file else default_source(config.n)
    nu = io_service.load_document(nu_file, MeasureDocument).to_measure() if nu_file else default_target(config.n, config.seed)

    outcome = run_pipeline(config, source, nu)
    Console().print(report_table(outcome.reports, f"pipeline checks ({Path(config.out)})"))
    for path in outcome.files:
        click.echo(str(path))
    _finish_checks(outcome.reports)


@cli.command()
@click.argument("suite", type=click.Choice(SUITES))
@click.option("--seed", type=int, default=None)
@click.option("--n", "n", type=int, default=1, show_default=True)
@click.option("--plan", "plan_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Also check a plan JSON file")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Write summary.csv and reports.json here")
@handle_errors
def verify(suite: str, seed: Optional[int], n: int, plan_file: Optional[str], out: Optional[str]):
    """Run a diagnostic suite and print its summary table"""
    seed = settings.DEFAULT_SEED if seed is None else seed
    reports = run_suite(suite, seed=seed, n=n)
    if plan_file:
        document = io_service.load_document(plan_file, PlanDocument)
        reports.extend(check_plan_document(document.to_plan(), seed=seed, epsilon=document.epsilon))

    Console().print(report_table(reports, f"verify {suite} (seed {seed})"))
    if out:
        target = Path(out)
        io_service.write_csv(summary_frame(reports), target / "summary.csv")
        passed = all(r.passed for r in reports)
        io_service.save_document(ReportsDocument(suite=suite, seed=seed, passed=passed, reports=reports), target / "reports.json")
    _finish_checks(reports)


if __name__ == "__main__":
    cli()
