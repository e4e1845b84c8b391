import logging

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special, stats

from extremo.dataset import bin_pairs
from extremo.models import SimKind
from extremo.schemas import SimSpec, Site
from extremo.utils.dependence import extremal_coefficient_curve
from extremo.utils.extremogram import empirical_extremogram
from extremo.utils.sim import gaussian_field_eta, max_over_replications, simulate, smith_theta


def line_sites(n, spacing):
    return tuple(Site(id=f"p{k}", x=k * spacing, y=0.0) for k in range(n))


def test_smith_theta_limits():
    assert smith_theta(0.0, 1.0) == 1.0
    assert smith_theta(1e3, 1.0) == pytest.approx(2.0)
    assert smith_theta(-2.0, 1.0) == smith_theta(2.0, 1.0)


def test_gaussian_field_eta():
    assert gaussian_field_eta(1.0, 1.0) == pytest.approx((1 + np.exp(-1)) / 2)
    assert gaussian_field_eta(0.0, 3.0) == 1.0


def test_spec_requires_kind_parameter():
    with pytest.raises(ValidationError):
        SimSpec(kind=SimKind.smith_storm, n_reps=10, seed=1)
    with pytest.raises(ValidationError):
        SimSpec(kind=SimKind.iid_frechet, n_reps=0, seed=1)
    with pytest.raises(ValidationError):
        SimSpec(kind=SimKind.iid_frechet, n_reps=10)


@pytest.mark.parametrize(
    "spec",
    [
        SimSpec(kind="iid_frechet", n_reps=3000, seed=1),
        SimSpec(kind="gaussian_copula_field", n_reps=3000, seed=2, range_r=1.0),
        SimSpec(kind="smith_storm", n_reps=3000, seed=3, storm_sigma=1.0),
        SimSpec(kind="logistic_pairs", n_reps=3000, seed=4, alpha=2.0),
    ],
)
def test_deterministic_for_any_thread_count(spec):
    sites = line_sites(5, 0.7)
    one = simulate(spec, sites, threads=1)
    four = simulate(spec, sites, threads=4)
    np.testing.assert_array_equal(one.values, four.values)
    assert one.values.shape == (3000, 5)
    assert one.rep_ids[0] == "1" and one.rep_ids[-1] == "3000"


@pytest.mark.parametrize(
    "spec",
    [
        SimSpec(kind="iid_frechet", n_reps=20_000, seed=5),
        SimSpec(kind="gaussian_copula_field", n_reps=20_000, seed=6, range_r=2.0),
        SimSpec(kind="smith_storm", n_reps=20_000, seed=7, storm_sigma=1.0),
        SimSpec(kind="logistic_pairs", n_reps=20_000, seed=8, alpha=3.0),
    ],
)
def test_unit_frechet_margins(spec):
    z = simulate(spec, line_sites(4, 1.0)).values
    assert np.all(z > 0)
    # 1/Z is standard exponential
    np.testing.assert_allclose(np.mean(1.0 / z, axis=0), 1.0, atol=0.05)


def test_gaussian_field_latent_correlation():
    sites = (Site(id="a", x=0.0, y=0.0), Site(id="b", x=1.0, y=0.0))
    z = simulate(SimSpec(kind="gaussian_copula_field", n_reps=50_000, seed=9, range_r=1.0), sites).values
    latent = special.ndtri(np.exp(-1.0 / z))
    assert np.corrcoef(latent.T)[0, 1] == pytest.approx(np.exp(-1.0), abs=0.02)


def test_smith_field_recovers_extremal_coefficient():
    field = simulate(SimSpec(kind="smith_storm", n_reps=10_000, seed=42, storm_sigma=1.0), line_sites(20, 0.5))
    edges = np.arange(0.25, 3.5, 0.5)  # one lag per bin: 0.5, 1.0, ..., 3.0
    bins = bin_pairs(field, edges)
    theta = extremal_coefficient_curve(field, bins, margin="frechet")
    rho = empirical_extremogram(field, bins, q=0.98)
    for distances, theta_hat, rho_hat in zip(bins.distances_per_bin, theta.estimates, rho.estimates):
        expected = float(np.mean(smith_theta(distances, 1.0)))
        assert theta_hat == pytest.approx(expected, abs=0.1)
        assert rho_hat == pytest.approx(2.0 - expected, abs=0.1)


def test_small_truncation_warns(caplog):
    spec = SimSpec(kind="smith_storm", n_reps=10, seed=1, storm_sigma=1.0, truncation_radius=1.0)
    with caplog.at_level(logging.WARNING):
        simulate(spec, line_sites(3, 1.0))
    assert "truncation radius" in caplog.text


def test_max_over_replications_is_max_stable():
    field = simulate(SimSpec(kind="iid_frechet", n_reps=20_000, seed=10), line_sites(2, 1.0))
    maxima = max_over_replications(field, 10)
    assert maxima.values.shape == (2000, 2)
    np.testing.assert_allclose(np.mean(1.0 / maxima.values, axis=0), 1.0, atol=0.07)
    np.testing.assert_array_equal(maxima.values[0], field.values[:10].max(axis=0) / 10)


def test_smith_field_margins_at_one():
    z = simulate(SimSpec(kind="smith_storm", n_reps=40_000, seed=43, storm_sigma=1.0), line_sites(3, 1.0)).values
    np.testing.assert_allclose(np.mean(z <= 1.0, axis=0), np.exp(-1.0), atol=0.01)


def test_smith_block_maxima_keep_the_distribution():
    sites = line_sites(2, 1.0)
    field = simulate(SimSpec(kind="smith_storm", n_reps=50_000, seed=44, storm_sigma=1.0), sites)
    maxima = max_over_replications(field, 50)
    single = simulate(SimSpec(kind="smith_storm", n_reps=2000, seed=45, storm_sigma=1.0), sites)
    for k in range(len(sites)):
        assert stats.ks_2samp(maxima.values[:, k], single.values[:, k]).pvalue > 0.01
