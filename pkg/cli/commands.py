"""
Command-line interface for hahnlab.

Usage:
    hahnlab diff --fn "z^2" --q 0.5 --c 1 --k 1
    hahnlab table --fn "z + 1/z" --targets "2,-2,inf" --format json
    hahnlab verify smt --fn "z^3 - 2*z + 1" --targets "0,1,inf"
    hahnlab verify fermat --fn "z"
    hahnlab solve-heq --coeffs "-1,1" --init "1,0" --order 12
"""

from __future__ import annotations

import functools
import json
import logging
import math
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np

from algebra.parse import parse_complex
from algebra.ratfun import POLE
from core.app import HahnLabApplication, parse_targets
from core.config_manager import ConfigManager, RunConfig
from core.errors import HahnLabError, InvalidArgumentError, SolverError
from processing.pipeline import NevTable
from verification.checks import CheckReport

__all__ = [
    "cli",
    "run",
]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_CHECK_FAILED = 3

CSV_FLOAT_FORMAT = "%.12g"
TABLE_FORMAT_VERSION = 1

logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """
    Convert values to strict-JSON types.

    Example:
        >>> jsonable(1 + 2j)
        {'re': 1.0, 'im': 2.0}
        >>> jsonable(float('inf')) is None
        True
    """
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [jsonable(item) for item in value.tolist()]
    if value is POLE:
        return "pole"
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": jsonable(value.real), "im": jsonable(value.imag)}
    return value


def dump_json(payload: Any) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2, allow_nan=False)


def parse_list(text: str, operation: str) -> List[complex]:
    """Comma-separated complex numbers"""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidArgumentError(operation, "empty list")
    return [parse_complex(item) for item in items]


def _report_error(message: str):
    click.secho(f"Error: {message}", err=True, fg=None if os.environ.get("NO_COLOR") else "red")


def handle_errors(command):
    """Map library exceptions onto exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except SolverError as e:
            logger.error(f"Numeric failure: {e}")
            _report_error(str(e))
            ctx.exit(EXIT_SOLVER)
        except HahnLabError as e:
            _report_error(str(e))
            ctx.exit(EXIT_INPUT)

    return wrapper


def _write(text: str, path: Optional[str]):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {path}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _application(ctx: click.Context, **overrides: Any) -> HahnLabApplication:
    base: RunConfig = ctx.obj["config"]
    return HahnLabApplication(base.with_overrides(**overrides))


def _emit_report(ctx: click.Context, report: CheckReport, output: Optional[str]):
    _write(dump_json(report.to_dict()) + "\n", output)
    logger.info(f"{report.name}: {report.verdict}")
    if not report.passed:
        ctx.exit(EXIT_CHECK_FAILED)


def render_table(table: NevTable, output_format: str) -> str:
    """CSV (version comment, header row, fixed columns) or JSON rendering of a table"""
    if output_format == "json":
        return dump_json({
            "version": TABLE_FORMAT_VERSION,
            "columns": table.columns(),
            "rows": table.to_records(),
            "nudged": [row.nudged for row in table.rows],
        }) + "\n"
    body = table.to_frame().to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return f"# hahnlab table v{TABLE_FORMAT_VERSION}\n" + body


def grid_options(command):
    """Radius grid and tolerance flags shared by table and verify commands"""
    options = (
        click.option("--q", "q", default=None, help="Dilation q as a+bi"),
        click.option("--c", "c", default=None, help="Shift c as a+bi"),
        click.option("--rmin", "r_min", type=float, default=None, help="Smallest radius"),
        click.option("--rmax", "r_max", type=float, default=None, help="Largest radius"),
        click.option("--grid", "grid_points", type=int, default=None, help="Number of geometric radii"),
        click.option("--theta", "theta_samples", type=int, default=None, help="Quadrature base panels"),
        click.option("--quad-tol", "quad_tol", type=float, default=None, help="Quadrature tolerance"),
        click.option("--cluster-tol", "cluster_tol", type=float, default=None, help="Root clustering tolerance"),
        click.option("--slack", "slack_fraction", type=float, default=None, help="Slack fraction of T"),
        click.option("--workers", type=int, default=None, help="Parallel row workers"),
        click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None,
                     help="Output file (default stdout)"),
    )
    for option in reversed(options):
        command = option(command)
    return command


@click.group()
@click.version_option(version="1.0.0", prog_name="hahnlab")
@click.pass_context
def cli(ctx: click.Context):
    """
    Hahn difference operators and Nevanlinna functionals for rational functions.

    Examples:

        hahnlab diff --fn "z^2" --q 0.5 --c 1

        hahnlab table --fn "z" --targets inf --rmin 1 --rmax 10 --grid 2

        hahnlab verify smt --fn "z + 1/z" --targets "2,-2,inf"
    """
    ctx.ensure_object(dict)
    if "config" not in ctx.obj:
        ctx.obj["config"] = RunConfig.from_dict(ConfigManager()._get_defaults())


@cli.command()
@click.option("--fn", "expr", required=True, help="Function literal in z")
@click.option("--k", "k", type=int, default=1, show_default=True, help="Iteration order")
@click.option("--q", "q", default=None, help="Dilation q as a+bi")
@click.option("--c", "c", default=None, help="Shift c as a+bi")
@click.option("--expanded", is_flag=True, help="Use the explicit binomial expansion")
@click.option("--precision", type=int, default=15, show_default=True, help="Significant digits")
@click.pass_context
@handle_errors
def diff(ctx: click.Context, expr: str, k: int, q: Optional[str], c: Optional[str],
         expanded: bool, precision: int):
    """Print D_{q,c}^k g as a canonical expression."""
    app = _application(ctx, q=q, c=c)
    click.echo(app.diff(expr, k, expanded, precision))


@cli.command()
@click.option("--fn", "expr", required=True, help="Function literal in z")
@click.option("--targets", required=True, help="Comma-separated values, 'inf' for infinity")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@grid_options
@click.pass_context
@handle_errors
def table(ctx: click.Context, expr: str, targets: str, output_format: Optional[str], **overrides: Any):
    """Emit the Nevanlinna table of g over the radius grid."""
    app = _application(ctx, output_format=output_format, **overrides)
    result = app.table(expr, parse_targets(targets))
    result.validate()
    _write(render_table(result, app.config.output_format), app.config.output_path)


@cli.group()
def verify():
    """Run a theorem check; exit 3 when it fails."""


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--targets", required=True)
@grid_options
@click.pass_context
@handle_errors
def smt(ctx: click.Context, expr: str, targets: str, **overrides: Any):
    """Second main theorem slack."""
    app = _application(ctx, **overrides)
    _emit_report(ctx, app.verify_smt(expr, parse_targets(targets)), app.config.output_path)


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--k", "k", type=int, default=1, show_default=True)
@grid_options
@click.pass_context
@handle_errors
def lodl(ctx: click.Context, expr: str, k: int, **overrides: Any):
    """Logarithmic difference lemma ratio."""
    app = _application(ctx, **overrides)
    _emit_report(ctx, app.verify_lodl(expr, k), app.config.output_path)


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--targets", required=True)
@grid_options
@click.pass_context
@handle_errors
def defects(ctx: click.Context, expr: str, targets: str, **overrides: Any):
    """Defect relation sums."""
    app = _application(ctx, **overrides)
    _emit_report(ctx, app.verify_defects(expr, parse_targets(targets)), app.config.output_path)


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--targets", required=True)
@grid_options
@click.pass_context
@handle_errors
def picard(ctx: click.Context, expr: str, targets: str, **overrides: Any):
    """Hahn-Picard exceptional values."""
    app = _application(ctx, **overrides)
    _emit_report(ctx, app.verify_picard(expr, parse_targets(targets)), app.config.output_path)


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--other", required=True, help="Second function literal")
@click.option("--targets", required=True, help="At least five values")
@click.option("--bound", type=int, default=0, show_default=True, help="Allowed point discrepancy")
@grid_options
@click.pass_context
@handle_errors
def share(ctx: click.Context, expr: str, other: str, targets: str, bound: int, **overrides: Any):
    """Five-value sharing comparison."""
    app = _application(ctx, **overrides)
    _emit_report(ctx, app.verify_share(expr, other, parse_targets(targets), bound), app.config.output_path)


@verify.command()
@click.option("--fn", "expr", required=True)
@click.option("--q", "q", default=None)
@click.option("--c", "c", default=None)
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def fermat(ctx: click.Context, expr: str, q: Optional[str], c: Optional[str], output_path: Optional[str]):
    """Residual of the Fermat-type Hahn equation."""
    app = _application(ctx, q=q, c=c, output_path=output_path)
    _emit_report(ctx, app.verify_fermat(expr), app.config.output_path)


@cli.command("solve-heq")
@click.option("--coeffs", required=True, help="Comma-separated A_0..A_{k-1} literals")
@click.option("--init", "init", required=True, help="Comma-separated a_0..a_{k-1}")
@click.option("--order", type=int, required=True, help="Truncation order N")
@click.option("--q", "q", default=None)
@click.option("--c", "c", default=None)
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def solve_heq(ctx: click.Context, coeffs: str, init: str, order: int, q: Optional[str], c: Optional[str],
              output_path: Optional[str]):
    """Power series solution of a linear Hahn difference equation."""
    app = _application(ctx, q=q, c=c, output_path=output_path)
    coeff_exprs = [item.strip() for item in coeffs.split(",") if item.strip()]
    if not coeff_exprs:
        raise InvalidArgumentError("solve-heq", "at least one coefficient required")
    result = app.solve_heq(coeff_exprs, parse_list(init, "solve-heq"), order)
    _write(dump_json(result) + "\n", app.config.output_path)


def run(argv: Optional[Sequence[str]] = None, config: Optional[Dict[str, Any]] = None) -> int:
    """
    Run the CLI and return its exit code.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])
        config: ConfigManager dictionary (default built-in defaults)

    Returns:
        0 success, 1 input or configuration error, 2 numeric failure, 3 failed check
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        base = RunConfig.from_dict(config if config is not None else ConfigManager()._get_defaults())
        result = cli.main(args=args, prog_name="hahnlab", standalone_mode=False, obj={"config": base})
    except click.exceptions.Abort:
        _report_error("aborted")
        return EXIT_INPUT
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    except HahnLabError as e:
        _report_error(str(e))
        return EXIT_INPUT
    return result if isinstance(result, int) else EXIT_OK
