import click

from extremo.commands.options import dataset_options, invoke, out_option, threads_option
from extremo.models import Command, TailSide

level_option = click.option(
    "--q", type=float, help="Exceedance probability level in (0.5, 1); each site uses its own empirical q-quantile."
)


@click.command("extremogram")
@dataset_options
@level_option
@click.option(
    "--side",
    type=click.Choice([side.value for side in TailSide]),
    default=TailSide.upper.value,
    show_default=True,
    help="Tail: upper exceedances of the q-quantile or lower ones below the (1 - q)-quantile.",
)
@threads_option
@out_option
def extremogram(sites, obs, bins, q, side, threads, out):
    """Empirical extremogram per distance bin (probability, dimensionless)."""
    invoke(Command.extremogram, sites=sites, obs=obs, bins=bins, q=q, side=side, threads=threads, out=out)


@click.command("cross-extremogram")
@dataset_options
@level_option
@threads_option
@out_option
def cross_extremogram(sites, obs, bins, q, threads, out):
    """rho11, rho22, rho12 and rho21 of a two-variable dataset; one JSON line per component and bin."""
    invoke(Command.cross_extremogram, sites=sites, obs=obs, bins=bins, q=q, threads=threads, out=out)
