import click

from extremo.commands.options import invoke, obs_option, out_option, sites_option
from extremo.models import Command


@click.command("fit-margins")
@sites_option
@obs_option
@out_option
def fit_margins(sites, obs, out):
    """Fit a GEV margin per site by probability-weighted moments; one JSON line per site."""
    invoke(Command.fit_margins, sites=sites, obs=obs, out=out)


@click.command("transform")
@sites_option
@obs_option
@click.option(
    "--to",
    type=click.Choice(["frechet", "uniform"]),
    default="frechet",
    show_default=True,
    help="Target scale: unit Frechet (dimensionless, > 0) or uniform probabilities in (0, 1).",
)
@out_option
def transform(sites, obs, to, out):
    """Fit GEV margins and rewrite the observations on a standard scale (CSV)."""
    invoke(Command.transform, sites=sites, obs=obs, to=to, out=out)
