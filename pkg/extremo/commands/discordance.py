import click

from extremo.commands.options import file_path, invoke, name_list, obs_option, out_option, sites_option
from extremo.models import Command, Direction


@click.command("discordance")
@sites_option
@obs_option
@click.option("--subset", callback=name_list, help="Comma-separated site ids forming the target block N_k.")
@click.option(
    "--direction",
    type=click.Choice([d.value for d in Direction]),
    default=Direction.upper.value,
    show_default=True,
    help="upper: N_k above, the rest at or below; lower: N_k below, the rest at or above.",
)
@click.option("--thresholds", type=file_path, help="CSV with columns site_id, threshold (observation units).")
@click.option("--median", is_flag=True, help="Use each site's empirical median as its threshold.")
@out_option
def discordance(sites, obs, subset, direction, thresholds, median, out):
    """N_k-discordance degree, a conditional probability in [0, 1]."""
    invoke(
        Command.discordance,
        sites=sites,
        obs=obs,
        subset=subset,
        direction=direction,
        thresholds=thresholds,
        median=median,
        out=out,
    )
