import click

from extremo.commands.options import dataset_options, invoke, out_option, threads_option
from extremo.models import Command, FitMode, ThresholdBasis


@click.command("taildep")
@dataset_options
@click.option("--threshold-q", type=float, help="Threshold as a probability level in (0, 1); converted to the Frechet scale.")
@click.option(
    "--threshold-basis",
    type=click.Choice([basis.value for basis in ThresholdBasis]),
    default=ThresholdBasis.marginal.value,
    show_default=True,
    help="marginal: u = -1/log(q); structure: u = empirical q-quantile of min(Z1, Z2).",
)
@click.option(
    "--mode",
    type=click.Choice([mode.value for mode in FitMode]),
    default=FitMode.standard.value,
    show_default=True,
    help="Hill-type formula variant.",
)
@click.option(
    "--margin",
    type=click.Choice(["rank", "gev", "frechet"]),
    default="rank",
    show_default=True,
    help="How observations reach unit-Frechet margins: ranks, fitted GEV, or already Frechet.",
)
@threads_option
@out_option
def taildep(sites, obs, bins, threshold_q, threshold_basis, mode, margin, threads, out):
    """Ledford-Tawn eta, c and extremal variogram gamma_E = 2(1 - eta) per distance bin."""
    invoke(
        Command.taildep,
        sites=sites,
        obs=obs,
        bins=bins,
        threshold_q=threshold_q,
        threshold_basis=threshold_basis,
        mode=mode,
        margin=margin,
        threads=threads,
        out=out,
    )
