import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from extremo.errors import InputError
from extremo.schemas import DistanceBins, Site, SpatialDataset

logger = logging.getLogger(__name__)

# A table is either a path to a CSV file or an already loaded DataFrame
TableSource = Union[str, Path, pd.DataFrame]

SITE_COLUMNS = ("site_id", "x", "y")
OBS_COLUMNS = ("rep_id", "site_id", "value")


def _read_table(source: TableSource, columns: Sequence[str], what: str) -> pd.DataFrame:
    if isinstance(source, pd.DataFrame):
        frame = source.copy()
    else:
        try:
            frame = pd.read_csv(
                source,
                dtype={"site_id": str, "rep_id": str, "variable": str},
                encoding="utf-8",
                float_precision="round_trip",
            )
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {what} table {source}: {exc}") from exc
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise InputError(f"{what} table is missing column(s): {', '.join(missing)}")
    if frame.empty:
        raise InputError(f"{what} table is empty")
    return frame


def _rep_order(rep_ids: pd.Series) -> list:
    """Replication labels sorted numerically when they all parse as numbers, lexically otherwise."""
    labels = pd.unique(rep_ids)
    numeric = pd.to_numeric(pd.Series(labels), errors="coerce")
    if numeric.notna().all():
        return [label for _, label in sorted(zip(numeric, labels))]
    return sorted(labels)


def load_sites(sites_table: TableSource) -> Tuple[Site, ...]:
    frame = _read_table(sites_table, SITE_COLUMNS, "sites")
    frame["site_id"] = frame["site_id"].astype(str)
    duplicated = frame["site_id"][frame["site_id"].duplicated()].unique()
    if len(duplicated):
        raise InputError(f"duplicate site id(s): {', '.join(duplicated)}")
    try:
        return tuple(Site(id=row.site_id, x=float(row.x), y=float(row.y)) for row in frame.itertuples(index=False))
    except ValueError as exc:
        raise InputError(f"invalid site row: {exc}") from exc


def load_dataset(sites_table: TableSource, obs_table: TableSource) -> SpatialDataset:
    """
    Assemble a replication matrix from a site table and a long observation table.

    Parameters:
    - sites_table: CSV path or DataFrame with columns site_id, x, y.
    - obs_table: CSV path or DataFrame with columns rep_id, site_id, value and an
      optional variable column for multi-variable data.

    Returns:
    - A SpatialDataset with replications sorted by rep_id and sites in site-table order.
      Cells absent from the observation table are NaN (missing).
    """
    sites = load_sites(sites_table)
    obs = _read_table(obs_table, OBS_COLUMNS, "observation")
    obs["site_id"] = obs["site_id"].astype(str)
    obs["rep_id"] = obs["rep_id"].astype(str)

    site_index = {site.id: k for k, site in enumerate(sites)}
    unknown = sorted(set(obs["site_id"]) - set(site_index))
    if unknown:
        raise InputError(f"unknown site id(s) in observations: {', '.join(unknown)}")

    keys = ["rep_id", "site_id"] + (["variable"] if "variable" in obs.columns else [])
    duplicated = obs.duplicated(subset=keys)
    if duplicated.any():
        first = obs[duplicated].iloc[0]
        raise InputError(f"duplicate observation for rep {first.rep_id}, site {first.site_id}")

    try:
        obs["value"] = pd.to_numeric(obs["value"], errors="raise")
    except (ValueError, TypeError) as exc:
        raise InputError(f"non-numeric observation value: {exc}") from exc

    reps = _rep_order(obs["rep_id"])
    rep_index = {rep: k for k, rep in enumerate(reps)}
    rows = obs["rep_id"].map(rep_index).to_numpy()
    cols = obs["site_id"].map(site_index).to_numpy()

    variable_names = None
    if "variable" in obs.columns:
        obs["variable"] = obs["variable"].astype(str)
        variable_names = tuple(pd.unique(obs["variable"]))
        var_index = {name: k for k, name in enumerate(variable_names)}
        values = np.full((len(reps), len(sites), len(variable_names)), np.nan)
        values[rows, cols, obs["variable"].map(var_index).to_numpy()] = obs["value"].to_numpy(dtype=float)
    else:
        values = np.full((len(reps), len(sites)), np.nan)
        values[rows, cols] = obs["value"].to_numpy(dtype=float)

    unobserved = [site.id for k, site in enumerate(sites) if np.isnan(values[:, k]).all()]
    if unobserved:
        logger.warning("sites without any observation: %s", ", ".join(unobserved))

    dataset = SpatialDataset(sites=sites, values=values, rep_ids=tuple(reps), variable_names=variable_names)
    logger.info("loaded %d replications at %d sites", dataset.n_reps, dataset.n_sites)
    return dataset


def to_frame(dataset: SpatialDataset) -> pd.DataFrame:
    """Long-format observation table; missing cells are left out."""
    rep_ids = np.asarray(dataset.rep_ids, dtype=object)
    site_ids = np.asarray(dataset.site_ids, dtype=object)
    if dataset.variable_names is None:
        reps, cols = np.nonzero(~np.isnan(dataset.values))
        return pd.DataFrame({"rep_id": rep_ids[reps], "site_id": site_ids[cols], "value": dataset.values[reps, cols]})
    reps, cols, var = np.nonzero(~np.isnan(dataset.values))
    names = np.asarray(dataset.variable_names, dtype=object)
    return pd.DataFrame(
        {
            "rep_id": rep_ids[reps],
            "site_id": site_ids[cols],
            "variable": names[var],
            "value": dataset.values[reps, cols, var],
        }
    )


def write_observations(dataset: SpatialDataset, path) -> None:
    to_frame(dataset).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def write_sites(sites: Sequence[Site], path) -> None:
    frame = pd.DataFrame({"site_id": [s.id for s in sites], "x": [s.x for s in sites], "y": [s.y for s in sites]})
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def check_edges(edges: Sequence[float]) -> Tuple[float, ...]:
    edges = tuple(float(e) for e in edges)
    if len(edges) < 2:
        raise InputError("bin edges need at least two values")
    if not all(np.isfinite(edges)):
        raise InputError("bin edges must be finite")
    if edges[0] < 0:
        raise InputError("first bin edge must be >= 0")
    if any(hi <= lo for lo, hi in zip(edges[:-1], edges[1:])):
        raise InputError("bin edges must be strictly increasing")
    return edges


def bin_pairs(dataset: SpatialDataset, edges: Sequence[float]) -> DistanceBins:
    """
    Group every unordered site pair (i, j), i < j, by planar Euclidean distance.

    A pair at distance d goes to bin k iff edges[k] <= d < edges[k+1]; pairs outside
    [edges[0], edges[-1]) are only counted in `discarded`.
    """
    edges = check_edges(edges)
    coords = dataset.coordinates
    i, j = np.triu_indices(dataset.n_sites, k=1)  # lexicographic (i, j) order
    dist = np.hypot(coords[j, 0] - coords[i, 0], coords[j, 1] - coords[i, 1])
    which = np.searchsorted(np.asarray(edges), dist, side="right") - 1
    inside = (which >= 0) & (which < len(edges) - 1)

    pairs_per_bin, distances_per_bin = [], []
    for k in range(len(edges) - 1):
        sel = inside & (which == k)
        pairs_per_bin.append(np.column_stack([i[sel], j[sel]]).astype(int))
        distances_per_bin.append(dist[sel])

    discarded = int(np.count_nonzero(~inside))
    if discarded:
        logger.debug("%d site pairs fall outside the bin edges", discarded)
    return DistanceBins(
        edges=edges,
        pairs_per_bin=tuple(pairs_per_bin),
        distances_per_bin=tuple(distances_per_bin),
        discarded=discarded,
    )


def pairwise_complete(
    values: np.ndarray, i: int, j: int, other: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Column i of `values` and column j of `other` (default `values`) on replications where both are observed."""
    a, b = values[:, i], (values if other is None else other)[:, j]
    keep = ~(np.isnan(a) | np.isnan(b))
    return a[keep], b[keep]
