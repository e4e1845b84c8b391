import numpy as np
import pandas as pd
import pytest

from extremo.schemas import Site, SpatialDataset


def build_dataset(values, coords=None) -> SpatialDataset:
    values = np.asarray(values, dtype=float)
    n_sites = values.shape[1]
    if coords is None:
        coords = [(float(k), 0.0) for k in range(n_sites)]
    sites = tuple(Site(id=f"s{k}", x=x, y=y) for k, (x, y) in enumerate(coords))
    rep_ids = tuple(str(r + 1) for r in range(values.shape[0]))
    if values.ndim == 3:
        names = tuple(f"v{k + 1}" for k in range(values.shape[2]))
        return SpatialDataset(sites=sites, values=values, rep_ids=rep_ids, variable_names=names)
    return SpatialDataset(sites=sites, values=values, rep_ids=rep_ids)


@pytest.fixture
def make_dataset():
    """Dataset from a (reps x sites [x variables]) array; sites s0, s1, ... on the x axis unless coords given."""
    return build_dataset


@pytest.fixture
def write_tables(tmp_path):
    """Write a dataset as sites.csv / obs.csv and return both paths."""

    def _write(dataset: SpatialDataset):
        from extremo.dataset import write_observations, write_sites

        sites_path, obs_path = tmp_path / "sites.csv", tmp_path / "obs.csv"
        write_sites(dataset.sites, sites_path)
        write_observations(dataset, obs_path)
        return sites_path, obs_path

    return _write


@pytest.fixture
def sites_frame():
    return pd.DataFrame({"site_id": ["A", "B"], "x": [0.0, 1.0], "y": [0.0, 0.0]})
