import numpy as np
import pandas as pd
import pytest

from extremo.dataset import bin_pairs, check_edges, load_dataset, pairwise_complete, write_observations
from extremo.errors import InputError


def test_load_dataset_shape(sites_frame):
    obs = pd.DataFrame(
        {"rep_id": ["1", "1", "2", "2", "3", "3"], "site_id": ["A", "B"] * 3, "value": [1, 2, 3, 4, 5, 6]}
    )
    data = load_dataset(sites_frame, obs)
    assert data.values.shape == (3, 2)
    assert data.site_ids == ["A", "B"]
    np.testing.assert_array_equal(data.values[:, 1], [2, 4, 6])


def test_numeric_rep_labels_sort_numerically(sites_frame):
    obs = pd.DataFrame({"rep_id": ["10", "2", "1"], "site_id": ["A", "A", "A"], "value": [10.0, 2.0, 1.0]})
    data = load_dataset(sites_frame, obs)
    assert data.rep_ids == ("1", "2", "10")
    np.testing.assert_array_equal(data.values[:, 0], [1.0, 2.0, 10.0])
    # site B never observed
    assert np.isnan(data.values[:, 1]).all()


def test_missing_cell_is_nan(sites_frame):
    obs = pd.DataFrame({"rep_id": ["1", "1", "2"], "site_id": ["A", "B", "A"], "value": [1.0, 2.0, 3.0]})
    data = load_dataset(sites_frame, obs)
    assert np.isnan(data.values[1, 1])


def test_unknown_site(sites_frame):
    obs = pd.DataFrame({"rep_id": ["1"], "site_id": ["Z9"], "value": [1.0]})
    with pytest.raises(InputError, match="unknown site"):
        load_dataset(sites_frame, obs)


def test_duplicate_observation(sites_frame):
    obs = pd.DataFrame({"rep_id": ["1", "1"], "site_id": ["A", "A"], "value": [1.0, 2.0]})
    with pytest.raises(InputError, match="duplicate observation"):
        load_dataset(sites_frame, obs)


def test_variable_column_gives_three_dimensions(sites_frame):
    obs = pd.DataFrame(
        {
            "rep_id": ["1"] * 4,
            "site_id": ["A", "A", "B", "B"],
            "variable": ["rain", "wind", "rain", "wind"],
            "value": [1.0, 2.0, 3.0, 4.0],
        }
    )
    data = load_dataset(sites_frame, obs)
    assert data.values.shape == (1, 2, 2)
    assert data.variable_names == ("rain", "wind")
    np.testing.assert_array_equal(data.variable("wind").values, [[2.0, 4.0]])


def test_observations_csv_reloads(tmp_path, make_dataset, write_tables):
    data = make_dataset([[0.1, 1.0 / 3.0], [np.nan, 2.5]])
    sites_path, obs_path = write_tables(data)
    again = load_dataset(sites_path, obs_path)
    np.testing.assert_array_equal(again.values, data.values)


def test_bin_pairs_example(make_dataset):
    data = make_dataset(np.zeros((1, 3)), coords=[(0, 0), (1, 0), (3, 0)])
    bins = bin_pairs(data, [0, 2, 4])
    assert [tuple(p) for p in bins.pairs_per_bin[0]] == [(0, 1)]
    assert [tuple(p) for p in bins.pairs_per_bin[1]] == [(0, 2), (1, 2)]
    assert bins.discarded == 0
    assert bins.centers == [1.0, 3.0]


def test_pair_on_last_edge_is_discarded(make_dataset):
    data = make_dataset(np.zeros((1, 2)), coords=[(0, 0), (4, 0)])
    bins = bin_pairs(data, [0, 2, 4])
    assert bins.n_pairs == [0, 0]
    assert bins.discarded == 1


def test_single_site_gives_empty_bins(make_dataset):
    bins = bin_pairs(make_dataset(np.zeros((2, 1))), [0, 1, 2])
    assert bins.n_pairs == [0, 0]


def test_pair_counts_add_up(make_dataset):
    rng = np.random.default_rng(3)
    coords = [tuple(c) for c in rng.uniform(0, 10, (25, 2))]
    bins = bin_pairs(make_dataset(np.zeros((1, 25)), coords=coords), [0, 2, 5, 9])
    assert sum(bins.n_pairs) + bins.discarded == 25 * 24 // 2


@pytest.mark.parametrize("edges", [[1.0], [2.0, 1.0], [-1.0, 2.0], [0.0, 0.0, 1.0], [0.0, np.inf]])
def test_bad_edges(edges):
    with pytest.raises(InputError):
        check_edges(edges)


def test_pairwise_complete():
    values = np.array([[1.0, 2.0], [np.nan, 3.0], [4.0, 5.0]])
    a, b = pairwise_complete(values, 0, 1)
    np.testing.assert_array_equal(a, [1.0, 4.0])
    np.testing.assert_array_equal(b, [2.0, 5.0])


def test_pairwise_complete_across_arrays():
    first = np.array([[1.0, 2.0], [3.0, np.nan], [5.0, 6.0]])
    second = np.array([[np.nan, 7.0], [8.0, 9.0], [10.0, 11.0]])
    a, b = pairwise_complete(first, 0, 1, second)
    np.testing.assert_array_equal(a, [1.0, 3.0, 5.0])
    np.testing.assert_array_equal(b, [7.0, 9.0, 11.0])
    a, b = pairwise_complete(first, 1, 0, second)
    np.testing.assert_array_equal(a, [6.0])
    np.testing.assert_array_equal(b, [10.0])


def test_write_observations_uses_full_precision(tmp_path, make_dataset):
    path = tmp_path / "obs.csv"
    write_observations(make_dataset([[0.1]]), path)
    assert "0.10000000000000001" in path.read_text()
