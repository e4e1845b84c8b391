import logging

import click

from extremo import config
from extremo.commands import dependence, discordance, extremogram, margins, simulate, taildep


@click.group()
@click.option("--verbose", is_flag=True, help="Log progress at INFO level (default level from EXTREMO_LOG_LEVEL).")
@click.option("--progress", is_flag=True, help="Show a progress bar for long simulations.")
@click.pass_context
def cli(ctx, verbose, progress):
    """Estimate and model extremal spatial dependence from replicated site observations."""
    level = logging.INFO if verbose else logging.getLevelName(config.LOG_LEVEL.upper())
    if not isinstance(level, int):
        raise click.UsageError(f"unknown log level in EXTREMO_LOG_LEVEL: {config.LOG_LEVEL}")
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = {"progress": progress}


# Register every command with the group
cli.add_command(margins.fit_margins)
cli.add_command(margins.transform)
cli.add_command(dependence.madogram)
cli.add_command(dependence.extremal_coeff)
cli.add_command(dependence.theta_copula)
cli.add_command(extremogram.extremogram)
cli.add_command(extremogram.cross_extremogram)
cli.add_command(taildep.taildep)
cli.add_command(discordance.discordance)
cli.add_command(simulate.simulate)
