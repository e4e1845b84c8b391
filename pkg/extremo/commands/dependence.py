import click

from extremo.commands.options import dataset_options, float_list, invoke, out_option, threads_option
from extremo.models import Command


@click.command("madogram")
@dataset_options
@threads_option
@out_option
def madogram(sites, obs, bins, threads, out):
    """Empirical madogram per distance bin, in the units of the observations."""
    invoke(Command.madogram, sites=sites, obs=obs, bins=bins, threads=threads, out=out)


@click.command("extremal-coeff")
@dataset_options
@click.option(
    "--margin",
    type=click.Choice(["gev", "frechet", "gumbel", "weibull"]),
    default="gev",
    show_default=True,
    help="Margin of the observations: raw GEV (fitted), unit Frechet, standard Gumbel or standard Weibull.",
)
@threads_option
@out_option
def extremal_coeff(sites, obs, bins, margin, threads, out):
    """Pairwise extremal coefficient theta(h) in [1, 2] per distance bin, from the madogram."""
    invoke(Command.extremal_coeff, sites=sites, obs=obs, bins=bins, margin=margin, threads=threads, out=out)


@click.command("theta-copula")
@click.option("--copula", help="Copula spec: independence, comonotone, gumbel:alpha=A, gaussian:rho=R, clayton:theta=T.")
@click.option(
    "--probes",
    callback=float_list,
    help="Comma-separated probability levels in (0, 1) at which log C(p, p) / log p is averaged.",
)
@out_option
def theta_copula(copula, probes, out):
    """Extremal coefficient of a parametric copula from its diagonal section."""
    invoke(Command.theta_copula, copula=copula, probes=probes, out=out)
