import logging

import numpy as np

from extremo.errors import EstimationError, InputError
from extremo.models import Direction
from extremo.schemas import DiscordanceResult, Partition, SpatialDataset

logger = logging.getLogger(__name__)


def _complete_rows(dataset: SpatialDataset) -> np.ndarray:
    return dataset.values[~np.isnan(dataset.values).any(axis=1)]


def discordance_degree(
    dataset: SpatialDataset, part: Partition, thresholds, direction: Direction = Direction.upper
) -> DiscordanceResult:
    """
    Empirical N_k-discordance degree.

    upper: P(X_N > x_N | X_rest <= x_rest), strict on the target block, weak on the conditioning block.
    lower: P(X_N < x_N | X_rest >= x_rest).
    Replications missing any site are skipped.
    """
    if dataset.n_vars != 1:
        raise InputError("discordance works on single-variable datasets")
    direction = Direction(direction)
    x = np.asarray(thresholds, dtype=float)
    if x.shape != (dataset.n_sites,):
        raise InputError(f"need one threshold per site ({dataset.n_sites}), got {x.size}")
    rest = part.complement(dataset.n_sites)
    target = list(part.n_k)

    values = _complete_rows(dataset)
    if direction == Direction.upper:
        condition = np.all(values[:, rest] <= x[list(rest)], axis=1)
        hit = np.all(values[:, target] > x[target], axis=1)
    else:
        condition = np.all(values[:, rest] >= x[list(rest)], axis=1)
        hit = np.all(values[:, target] < x[target], axis=1)

    n_condition = int(np.count_nonzero(condition))
    if n_condition == 0:
        raise EstimationError("conditioning event never observed")
    n_joint = int(np.count_nonzero(condition & hit))
    return DiscordanceResult(
        delta=n_joint / n_condition, n_condition=n_condition, n_joint=n_joint, direction=direction
    )


def site_medians(dataset: SpatialDataset) -> np.ndarray:
    """
    Per-site empirical medians over the complete replications, the same rows the degree is counted on.

    An even count takes the mid-rank average of the two middle values.
    """
    values = _complete_rows(dataset)
    if values.shape[0] == 0:
        raise EstimationError("no replication observes every site")
    return np.median(values, axis=0)


def median_discordance(
    dataset: SpatialDataset, part: Partition, direction: Direction = Direction.upper
) -> DiscordanceResult:
    """Discordance degree at the per-site empirical medians."""
    return discordance_degree(dataset, part, site_medians(dataset), direction)
