"""Command-line interface."""
import logging
import time
from enum import Enum
from pathlib import Path
from typing import Optional

import click

from lp_tile_lab.config import MAX_SEED
from lp_tile_lab.config import load_config
from lp_tile_lab.errors import ConfigError
from lp_tile_lab.errors import DomainError
from lp_tile_lab.experiments import EXPERIMENTS
from lp_tile_lab.experiments import run_experiment
from lp_tile_lab.report import emit_report

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

logger = logging.getLogger("lp_tile_lab.cli")

#: Exit status when the report was written but some checks failed.
EXIT_FAILURES = 3


class Verbosity(Enum):
    """Verbosity level of the tool."""

    Quiet = -1
    Normal = 0
    Verbose = 1
    Debug = 2


LOG_LEVELS = {
    Verbosity.Quiet: logging.ERROR,
    Verbosity.Normal: logging.WARNING,
    Verbosity.Verbose: logging.INFO,
    Verbosity.Debug: logging.DEBUG,
}


class EchoHandler(logging.Handler):
    """Send log records to standard error through click."""

    def emit(self, record: logging.LogRecord) -> None:
        """Echo the formatted record."""
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def configure_logging(verbosity: Verbosity) -> None:
    """Route the package loggers to standard error at the level of VERBOSITY."""
    handler = EchoHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s: %(name)s: %(message)s"))
    root = logging.getLogger("lp_tile_lab")
    root.handlers[:] = [handler]
    root.setLevel(LOG_LEVELS[verbosity])


@click.command(context_settings=CONTEXT_SETTINGS)
@click.argument("experiment", type=click.Choice(sorted(EXPERIMENTS)))
@click.option(
    "--config",
    "-c",
    "config_file",
    help="Read experiment parameters from the INI file FILE.",
    metavar="FILE",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option(
    "--seed",
    help="Seed of every random draw, overriding the configuration.",
    type=click.IntRange(0, MAX_SEED),
)
@click.option(
    "--out",
    "-o",
    "out_dir",
    default=Path("."),
    show_default=True,
    help="Write <EXPERIMENT>.csv and <EXPERIMENT>.json to DIR.",
    metavar="DIR",
    type=click.Path(file_okay=False, path_type=Path),
)
@click.option(
    "--n",
    "n",
    help="Grid size, a power of two, overriding the configuration.",
    type=click.IntRange(min=1),
)
@click.option(
    "--timing",
    is_flag=True,
    help="Record the wall time of the run in the JSON report.",
)
@click.option(
    "--debug",
    "-d",
    "verbosity",
    is_flag=True,
    flag_value=Verbosity.Debug,
    help="Show every intermediate step.",
    type=Verbosity,
)
@click.option(
    "--verbose",
    "-v",
    "verbosity",
    is_flag=True,
    flag_value=Verbosity.Verbose,
    help="Show progress and the files written.",
    type=Verbosity,
)
@click.option(
    "--quiet",
    "-q",
    "verbosity",
    is_flag=True,
    flag_value=Verbosity.Quiet,
    help="Show errors only.",
    type=Verbosity,
)
@click.version_option(package_name="lp-tile-lab")
def main(
    experiment: str,
    config_file: Optional[Path],
    seed: Optional[int],
    out_dir: Path,
    n: Optional[int],
    timing: bool,
    verbosity: Optional[Verbosity],
) -> None:
    """Run EXPERIMENT and write its table and summary.

    The exit status is 0 when every check passed, 2 for bad parameters and 3
    when the report was written but some checks failed.
    """
    if verbosity is None:
        verbosity = Verbosity.Normal
    configure_logging(verbosity)

    def log(message: str) -> None:
        if verbosity.value >= Verbosity.Verbose.value:
            click.echo(message, err=True)

    try:
        config = load_config(experiment, config_file, seed, n)
        start = time.perf_counter()
        result = run_experiment(config)
        elapsed = time.perf_counter() - start
        logger.info("ran %s in %.3f s", experiment, elapsed)
    except (ConfigError, DomainError) as exc:
        raise click.UsageError(str(exc)) from exc

    try:
        emit_report(result, config, out_dir, elapsed if timing else None, log)
    except OSError as exc:
        raise click.UsageError(f"cannot write the report to '{out_dir}': {exc}") from exc

    if verbosity != Verbosity.Quiet:
        for key, value in sorted(result.summary.items()):
            click.echo(f"{key}: {value}")
    if result.failures:
        for failure in result.failures:
            click.echo(f"failed: {failure}", err=True)
        raise SystemExit(EXIT_FAILURES)


if __name__ == "__main__":
    main(prog_name="lp-tile-lab")  # pragma: no cover
