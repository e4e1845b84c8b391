"""Flags shared by several commands and the RunConfig hand-off."""
from pathlib import Path

import click
from pydantic import ValidationError

from extremo import config
from extremo.models import Command
from extremo.runner import describe_validation, run
from extremo.schemas import RunConfig


def _split(value):
    if value is None:
        return None
    return [part.strip() for part in value.split(",") if part.strip()]


def float_list(ctx, param, value):
    """Comma-separated numbers, e.g. `0,1,2.5`."""
    parts = _split(value)
    if parts is None:
        return None
    try:
        return [float(part) for part in parts]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{value}'") from None


def name_list(ctx, param, value):
    return _split(value)


file_path = click.Path(dir_okay=False, path_type=Path)

sites_option = click.option("--sites", type=file_path, help="Site table CSV with columns site_id, x, y.")
obs_option = click.option(
    "--obs", type=file_path, help="Observation CSV with columns rep_id, site_id, value [, variable]."
)
bins_option = click.option(
    "--bins",
    callback=float_list,
    help="Comma-separated distance bin edges, in the units of the site coordinates; bins are [lo, hi).",
)
out_option = click.option("--out", type=file_path, help="Output file; standard output when omitted.")
threads_option = click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=config.DEFAULT_THREADS,
    envvar="EXTREMO_THREADS",
    show_default=True,
    help="Worker threads (env EXTREMO_THREADS). Never changes the output.",
)


def dataset_options(func):
    """--sites, --obs and --bins."""
    return sites_option(obs_option(bins_option(func)))


def invoke(command: Command, **params) -> None:
    """Validate flags into a RunConfig, run it and exit with its status."""
    ctx = click.get_current_context()
    params.setdefault("progress", bool((ctx.obj or {}).get("progress")))
    try:
        run_config = RunConfig(command=command, **params)
    except ValidationError as exc:
        click.echo(f"error: {describe_validation(exc)}", err=True)
        ctx.exit(2)
    ctx.exit(run(run_config))
