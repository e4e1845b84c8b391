import click

from extremo.commands.options import invoke, out_option, sites_option, threads_option
from extremo.models import Command, SimKind

# Short names accepted by --kind
KIND_ALIASES = {
    "iid": SimKind.iid_frechet,
    "gaussian": SimKind.gaussian_copula_field,
    "smith": SimKind.smith_storm,
    "logistic": SimKind.logistic_pairs,
}
KIND_ALIASES.update({kind.value: kind for kind in SimKind})


@click.command("simulate")
@sites_option
@click.option("--kind", type=click.Choice(sorted(KIND_ALIASES)), help="Field model to draw from.")
@click.option("--sigma", type=float, help="Storm scale of the smith model, in site-coordinate units.")
@click.option("--range", "range_r", type=float, help="Exponential correlogram range of the gaussian field, in site-coordinate units.")
@click.option("--alpha", type=float, help="Logistic dependence parameter, >= 1 (1 is independence).")
@click.option(
    "--truncation",
    type=float,
    help="Smith window padding around the sites, in site-coordinate units [default: 4 sigma].",
)
@click.option("--reps", type=int, help="Number of replications.")
@click.option("--seed", type=int, help="Random seed; required, the output is a function of it.")
@threads_option
@out_option
def simulate(sites, kind, sigma, range_r, alpha, truncation, reps, seed, threads, out):
    """Draw replications with unit-Frechet margins at the given sites (observation CSV)."""
    invoke(
        Command.simulate,
        sites=sites,
        kind=KIND_ALIASES[kind] if kind else None,
        sigma=sigma,
        range_r=range_r,
        alpha=alpha,
        truncation=truncation,
        reps=reps,
        seed=seed,
        threads=threads,
        out=out,
    )
