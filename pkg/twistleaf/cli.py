"""Command line: ``twistleaf verify <claim>`` and ``twistleaf survey <kind>``."""

from __future__ import annotations

import sys
from collections import Counter
from pathlib import Path
from typing import Callable, Optional

import typer
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import homogeneous, suites
from .config import DEFAULT_SCENARIOS, RunConfig, Settings
from .enums import Mode, OutputFormat
from .exceptions import TwistleafError
from .reports import RunReport

app = typer.Typer(help="Verify twisted Poisson structures on SU(n) and their quotients")
verify_app = typer.Typer(help="Run claim-by-claim verification suites")
survey_app = typer.Typer(help="Sample leaf ranks and Schubert cells")
app.add_typer(verify_app, name="verify")
app.add_typer(survey_app, name="survey")
console = Console()

N_OPTION = typer.Option(..., "--n", help="Size of the matrix group, 2..8")
M_OPTION = typer.Option(
    None, "--m", "--k", help="Twist size m or Grassmannian rank k (default: all valid)"
)
L_OPTION = typer.Option(None, "--l", help="Block size l of K_l (default: all valid)")
C_OPTION = typer.Option("1/3", "--c", help="Rational parameter, e.g. 1/3")
MODE_OPTION = typer.Option(Mode.EXACT, "--mode")
SAMPLES_OPTION = typer.Option(20, "--samples", min=1)
SCENARIOS_OPTION = typer.Option(
    DEFAULT_SCENARIOS, "--scenarios", min=1, help="Random scenarios per sampled claim"
)
TOLERANCE_OPTION = typer.Option(
    None, "--tolerance", help="Float identities in ∧²g (default: TWISTLEAF_TOLERANCE)"
)
GROUP_TOLERANCE_OPTION = typer.Option(
    None, "--group-tolerance", help="Checks involving group products"
)
RANK_TOLERANCE_OPTION = typer.Option(
    None, "--rank-tolerance", help="Relative singular-value threshold of leaf ranks"
)
SEED_OPTION = typer.Option(None, "--seed", help="Default: TWISTLEAF_SEED or 20240501")
OUTPUT_OPTION = typer.Option(None, "--output", "-o")
FORMAT_OPTION = typer.Option(OutputFormat.JSON, "--format")
WORKERS_OPTION = typer.Option(
    None, "--workers", min=1, help="Default: TWISTLEAF_WORKERS or CPU count"
)
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v")
DEBUG_OPTION = typer.Option(False, "--debug")

REPORT_DIR = Path("reports")


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(
        sys.stderr, level=level, format="<level>{level: <8}</level> {name}: {message}"
    )


@app.callback()
def main(verbose: bool = VERBOSE_OPTION, debug: bool = DEBUG_OPTION) -> None:
    level = Settings.from_env().log_level
    if verbose:
        level = "INFO"
    if debug:
        level = "DEBUG"
    configure_logging(level)


def _usage_error(exc: Exception) -> typer.Exit:
    console.print(f"[red]error:[/red] {exc}")
    return typer.Exit(code=2)


def _settings(workers: Optional[int]) -> Settings:
    settings = Settings.from_env()
    if workers is not None:
        settings = settings.model_copy(update={"workers": workers})
    return settings


def _default_output(name: str, output_format: OutputFormat) -> Path:
    suffix = "md" if output_format is OutputFormat.MARKDOWN else "json"
    return REPORT_DIR / f"{name}.{suffix}"


def _print_report(report: RunReport) -> None:
    table = Table(title=f"run {report.run_id}")
    for column in ("claim", "n", "m/k", "c", "residual", "result"):
        table.add_column(column)
    for check in report.claims:
        table.add_row(
            check.claim,
            str(check.n),
            "-" if check.m_or_k is None else str(check.m_or_k),
            check.c or "-",
            f"{check.max_residual:.3e}",
            "[green]pass[/green]" if check.passed else "[red]FAIL[/red]",
        )
    console.print(table)
    summary = report.summary
    console.print(
        f"{summary.passed} passed, {summary.failed} failed, {summary.skipped} skipped"
    )


def _finish(report: RunReport, output: Path, output_format: OutputFormat) -> None:
    path = report.write(output, output_format)
    _print_report(report)
    console.print(f"report written to {path}")
    raise typer.Exit(code=report.exit_code)


def _verify_command(name: str) -> Callable[..., None]:
    def command(
        n: int = N_OPTION,
        m_or_k: Optional[int] = M_OPTION,
        l: Optional[int] = L_OPTION,
        c: str = C_OPTION,
        mode: Mode = MODE_OPTION,
        samples: int = SAMPLES_OPTION,
        scenarios: int = SCENARIOS_OPTION,
        seed: Optional[int] = SEED_OPTION,
        tolerance: Optional[float] = TOLERANCE_OPTION,
        group_tolerance: Optional[float] = GROUP_TOLERANCE_OPTION,
        rank_tolerance: Optional[float] = RANK_TOLERANCE_OPTION,
        output: Optional[Path] = OUTPUT_OPTION,
        output_format: OutputFormat = FORMAT_OPTION,
        workers: Optional[int] = WORKERS_OPTION,
    ) -> None:
        settings = _settings(workers)
        try:
            config = RunConfig(
                command=name,
                n=n,
                m_or_k=m_or_k,
                l=l,
                c=c,
                mode=mode,
                samples=samples,
                scenarios=scenarios,
                seed=settings.seed if seed is None else seed,
                tolerance=tolerance,
                group_tolerance=group_tolerance,
                rank_tolerance=rank_tolerance,
                output=output,
                output_format=output_format,
            )
            report = suites.run(config, settings)
        except (ValidationError, TwistleafError) as exc:
            raise _usage_error(exc) from exc
        _finish(report, output or _default_output(name, output_format), output_format)

    command.__doc__ = f"Verify the {name} claims."
    return command


for _name in suites.SUITES:
    verify_app.command(_name)(_verify_command(_name))


@verify_app.command("all")
def verify_all(
    samples: int = SAMPLES_OPTION,
    scenarios: int = SCENARIOS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    tolerance: Optional[float] = TOLERANCE_OPTION,
    group_tolerance: Optional[float] = GROUP_TOLERANCE_OPTION,
    rank_tolerance: Optional[float] = RANK_TOLERANCE_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    output_format: OutputFormat = FORMAT_OPTION,
    workers: Optional[int] = WORKERS_OPTION,
) -> None:
    """Run every claim over n in {3, 4, 5} and c in {1/3, 1/2, 2/5}."""
    settings = _settings(workers)
    overrides = {
        "algebra_tolerance": tolerance,
        "group_tolerance": group_tolerance,
        "rank_tolerance": rank_tolerance,
    }
    try:
        settings = Settings.model_validate(
            {
                **settings.model_dump(),
                **{key: value for key, value in overrides.items() if value is not None},
            }
        )
        seed = settings.seed if seed is None else seed
        report = suites.run_grid(samples, seed, settings, scenarios=scenarios)
    except (ValidationError, TwistleafError) as exc:
        raise _usage_error(exc) from exc
    _finish(report, output or _default_output("all", output_format), output_format)


@survey_app.command("leaves")
def survey_leaves(
    n: int = N_OPTION,
    k: int = typer.Option(1, "--k"),
    c: str = C_OPTION,
    samples: int = typer.Option(200, "--samples", min=1),
    seed: Optional[int] = SEED_OPTION,
    output: Path = typer.Option(REPORT_DIR / "leaves.csv", "--output", "-o"),
) -> None:
    """Leaf ranks of the twisted Grassmannian quotient at random points, as CSV."""
    settings = Settings.from_env()
    try:
        RunConfig(command="survey-leaves", n=n, m_or_k=k, c=c, samples=samples)
        rows = homogeneous.survey_leaves(
            n, k, c, samples, settings.seed if seed is None else seed
        )
    except (ValidationError, TwistleafError) as exc:
        raise _usage_error(exc) from exc
    path = homogeneous.write_leaf_csv(rows, output)
    table = Table(title=f"leaf ranks, n={n} k={k} c={c}")
    table.add_column("rank")
    table.add_column("points")
    for rank, count in sorted(Counter(row.rank for row in rows).items()):
        table.add_row(str(rank), str(count))
    console.print(table)
    console.print(f"{len(rows)} rows written to {path}")


@survey_app.command("schubert")
def survey_schubert(
    n: int = N_OPTION,
    k: int = typer.Option(1, "--k"),
    samples: int = typer.Option(5, "--samples", min=1),
    seed: Optional[int] = SEED_OPTION,
) -> None:
    """Print the Bruhat poset of G_k^n and check closure monotonicity."""
    settings = Settings.from_env()
    try:
        RunConfig(command="survey-schubert", n=n, m_or_k=k)
        poset = homogeneous.bruhat_poset(n, k)
        report = homogeneous.check_bruhat_monotonicity(
            n, k, samples, settings.seed if seed is None else seed
        )
    except (ValidationError, TwistleafError) as exc:
        raise _usage_error(exc) from exc
    table = Table(title=f"Schubert cells of G_{k}^{n}")
    table.add_column("symbol")
    table.add_column("complex dim")
    table.add_column("covered by")
    for symbol in sorted(poset.nodes, key=lambda s: (s.cell_dim, s.parts)):
        covers = ", ".join(str(t) for t in poset.successors(symbol))
        table.add_row(str(symbol), str(symbol.cell_dim), covers or "-")
    console.print(table)
    verdict = "[green]monotone[/green]" if report.passed else "[red]violations[/red]"
    violations = int(report.max_residual)
    console.print(f"closure monotonicity: {verdict} ({violations} violations)")
    raise typer.Exit(code=0 if report.passed else 1)


if __name__ == "__main__":
    app()
