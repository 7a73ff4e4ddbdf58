"""
Command-line entry point: verify <target>, fock and wyler.

Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration
or unsupported dimension, 3 internal error.
"""
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app.config import RunConfig, load_run_config, parse_overrides
from app.errors import ConfigError, DimensionError
from app.reports import REPORT_KINDS, write_csv, write_json_report
from app.suites import VERIFY_TARGETS, SuiteResult, run_fock, run_wyler

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_BAD_CONFIG = 2
EXIT_INTERNAL = 3

app = typer.Typer(help="Pure-spinor verification workbench", no_args_is_help=True)
console = Console()


class Target(str, Enum):
    CLIFFORD = "clifford"
    PURITY = "purity"
    NULL_THEOREM = "null-theorem"
    MAXWELL = "maxwell"
    GRAVITY = "gravity"


N_OPTION = typer.Option(None, "--n", help="Algebra half-dimension n (vector dimension 2n)")
TRIALS_OPTION = typer.Option(None, "--trials", help="Random trials per arm")
SEED_OPTION = typer.Option(None, "--seed", help="Root seed for the seed splitter")
TOL_OPTION = typer.Option(
    None, "--tol", help="Tolerance: rank cutoff for verify, quadrature for fock, round trip for wyler"
)
NMAX_OPTION = typer.Option(None, "--nmax", help="Highest principal quantum number")
GRID_OPTION = typer.Option(None, "--grid", help="Max adaptive subintervals for the eigenvalue quadrature")
NYSTROM_GRID_OPTION = typer.Option(None, "--nystrom-grid", help="Nodes per polar level of the S^3 grid")
NYSTROM_TERMS_OPTION = typer.Option(None, "--nystrom-terms", help="Zonal terms subtracted at each Nystrom node")
MC_SAMPLES_OPTION = typer.Option(None, "--mc-samples", help="Monte-Carlo samples for the S4 volume")
OUT_OPTION = typer.Option(None, "--out", help="Report directory")
CONFIG_OPTION = typer.Option(None, "--config", help="Flat key=value config file")
OVERRIDE_OPTION = typer.Option(None, "--override", help="Volume override NAME=VALUE (repeatable)")


def setup_logging(log_dir: Path) -> None:
    """Append to log_dir/workbench.log and echo to stdout."""
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_dir / "workbench.log", mode='a'),
            logging.StreamHandler(sys.stdout),
        ],
        force=True,
    )


def _command_line(name: str, **flags: Any) -> str:
    parts = [name]
    for key, value in flags.items():
        if value is None:
            continue
        values = value if isinstance(value, list) else [value]
        for item in values:
            parts.append(f"--{key.replace('_', '-')} {item}")
    return " ".join(parts)


def _print_checks(result: SuiteResult) -> None:
    table = Table(title=f"{result.suite} checks")
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Detail")
    for check in result.checks:
        status = "[green]PASS[/green]" if check["pass"] else "[red]FAIL[/red]"
        table.add_row(check["check"], status, check["detail"])
    console.print(table)


def _persist(result: SuiteResult, cfg: RunConfig, command: str) -> Path:
    stem = result.suite
    for name, frame in result.tables.items():
        write_csv(cfg.out_dir / f"{stem}_{name}.csv", frame)
    return write_json_report(cfg.out_dir / f"{stem}.json", result.report(cfg), command=command,
                             kind=REPORT_KINDS[result.suite])


def _execute(config_file: Optional[Path], flags: Dict[str, Any], command: str,
             body: Callable[[RunConfig], SuiteResult]) -> None:
    try:
        cfg = load_run_config(config_file, **flags)
    except ConfigError as exc:
        console.print(f"[red]❌ {exc}[/red]")
        raise typer.Exit(code=EXIT_BAD_CONFIG)

    setup_logging(cfg.log_dir)
    logger.info(f"Running: {command}")
    try:
        result = body(cfg)
        path = _persist(result, cfg, command)
    except (ConfigError, DimensionError, ValidationError) as exc:
        logger.error(f"Bad configuration: {exc}")
        console.print(f"[red]❌ {exc}[/red]")
        raise typer.Exit(code=EXIT_BAD_CONFIG)
    except Exception as exc:
        logger.exception(f"Internal error while running '{command}': {exc}")
        console.print(f"[red]❌ internal error: {exc}[/red]")
        raise typer.Exit(code=EXIT_INTERNAL)

    _print_checks(result)
    if result.passed:
        console.print(f"✅ {result.suite}: all {len(result.checks)} checks passed, report {path}")
        return
    console.print(f"[red]❌ {result.suite}: {len(result.failures)} check(s) failed, report {path}[/red]")
    raise typer.Exit(code=EXIT_FAIL)


@app.command("verify")
def verify(
    target: Target = typer.Argument(..., help="Suite to run"),
    n: Optional[int] = N_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    tol: Optional[float] = TOL_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Optional[Path] = OUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
) -> None:
    """Run one verification suite and write its JSON report."""
    flags = {"n": n, "trials": trials, "seed": seed, "tol": tol, "grid": grid, "out_dir": out}
    command = _command_line(f"verify {target.value}", n=n, trials=trials, seed=seed, tol=tol, grid=grid,
                            out=out, config=config)
    _execute(config, flags, command, VERIFY_TARGETS[target.value])


@app.command("fock")
def fock(
    nmax: Optional[int] = NMAX_OPTION,
    grid: Optional[int] = GRID_OPTION,
    nystrom_grid: Optional[int] = NYSTROM_GRID_OPTION,
    nystrom_terms: Optional[int] = NYSTROM_TERMS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    tol: Optional[float] = TOL_OPTION,
    out: Optional[Path] = OUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
) -> None:
    """Solve the hydrogen spectrum and write the level table, diagram and cross-checks."""
    flags = {"n_max": nmax, "grid": grid, "nystrom_grid": nystrom_grid, "nystrom_terms": nystrom_terms,
             "seed": seed, "tol": tol, "out_dir": out}
    command = _command_line("fock", nmax=nmax, grid=grid, nystrom_grid=nystrom_grid, nystrom_terms=nystrom_terms,
                            seed=seed, tol=tol, out=out, config=config)
    _execute(config, flags, command, run_fock)


@app.command("wyler")
def wyler(
    override: Optional[List[str]] = OVERRIDE_OPTION,
    mc_samples: Optional[int] = MC_SAMPLES_OPTION,
    seed: Optional[int] = SEED_OPTION,
    tol: Optional[float] = TOL_OPTION,
    out: Optional[Path] = OUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
) -> None:
    """Evaluate Wyler's closed-form alpha with optional volume overrides."""
    try:
        overrides = parse_overrides(override)
    except ConfigError as exc:
        console.print(f"[red]❌ {exc}[/red]")
        raise typer.Exit(code=EXIT_BAD_CONFIG)
    flags = {"mc_samples": mc_samples, "seed": seed, "tol": tol, "out_dir": out}
    command = _command_line("wyler", override=override, mc_samples=mc_samples, seed=seed, tol=tol, out=out,
                            config=config)
    _execute(config, flags, command, lambda cfg: run_wyler(cfg, overrides))


def main() -> None:
    app()


if __name__ == "__main__":
    main()
