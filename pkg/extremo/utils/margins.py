"""GEV margins: evaluation, PWM fitting and transforms to the unit-Frechet and uniform scales."""
import logging
import math
from typing import Dict, Mapping, Sequence, Union

import numpy as np
from scipy import special, stats

from extremo import config
from extremo.errors import EstimationError, InputError, OutsideSupportError
from extremo.schemas import GevParams, SpatialDataset

logger = logging.getLogger(__name__)

Fits = Union[Mapping[str, GevParams], Sequence[GevParams]]


def _dist(p: GevParams):
    # scipy's genextreme uses c = -xi
    return stats.genextreme(c=-p.xi, loc=p.mu, scale=p.sigma)


def gev_cdf(p: GevParams, z):
    """
    GEV distribution function exp{-[1 + xi (z - mu)/sigma]^(-1/xi)}.

    Total: 0 left of the support (xi > 0), 1 right of it (xi < 0); xi = 0 is the Gumbel case.
    """
    out = _dist(p).cdf(z)
    return float(out) if np.ndim(out) == 0 else out


def gev_logcdf(p: GevParams, z):
    out = _dist(p).logcdf(z)
    return float(out) if np.ndim(out) == 0 else out


def gev_quantile(p: GevParams, q):
    q_arr = np.asarray(q, dtype=float)
    if np.any(~((q_arr > 0) & (q_arr < 1))):
        raise InputError("GEV quantile level must lie in (0, 1)")
    out = _dist(p).ppf(q_arr)
    return float(out) if np.ndim(out) == 0 else out


def _pwm_lmoments(sample: np.ndarray):
    """First three sample L-moments from unbiased probability-weighted moments."""
    x = np.sort(sample)
    n = len(x)
    i = np.arange(n, dtype=float)  # zero-based rank
    b0 = x.mean()
    b1 = np.sum(i / (n - 1) * x) / n
    b2 = np.sum(i * (i - 1) / ((n - 1) * (n - 2)) * x) / n
    return b0, 2 * b1 - b0, 6 * b2 - 6 * b1 + b0


def _gev_from_lmoments(l1: float, l2: float, k: float):
    # Hosking's parametrisation, shape k = -xi
    if abs(k) < 1e-9:
        sigma = l2 / math.log(2.0)
        return l1 - np.euler_gamma * sigma, sigma
    g = math.gamma(1.0 + k)
    sigma = l2 * k / ((1.0 - 2.0 ** (-k)) * g)
    return l1 - sigma * (1.0 - g) / k, sigma


def fit_gev(sample) -> GevParams:
    """
    Fit a GEV margin by probability-weighted moments (L-moments).

    The shape is kept in [XI_MIN, XI_MAX]; when the raw estimate falls outside, location and
    scale are refitted at the clamped shape and the result is flagged `clamped`.
    """
    x = np.asarray(sample, dtype=float)
    x = x[~np.isnan(x)]
    n_distinct = len(np.unique(x))
    if len(x) < config.MIN_GEV_SAMPLE:
        raise EstimationError(f"insufficient sample for a GEV fit: {len(x)} values, need {config.MIN_GEV_SAMPLE}")
    if n_distinct == 1:
        raise EstimationError("degenerate sample: all values are equal")
    if n_distinct < config.MIN_GEV_SAMPLE:
        raise EstimationError(f"insufficient sample for a GEV fit: {n_distinct} distinct values")

    l1, l2, l3 = _pwm_lmoments(x)
    t3 = l3 / l2
    c = 2.0 / (3.0 + t3) - math.log(2.0) / math.log(3.0)
    k = 7.8590 * c + 2.9554 * c**2

    xi = -k
    clamped = not config.XI_MIN <= xi <= config.XI_MAX
    if clamped:
        logger.warning("GEV shape %.4f clamped into [%.2f, %.2f]", xi, config.XI_MIN, config.XI_MAX)
        xi = min(max(xi, config.XI_MIN), config.XI_MAX)
    mu, sigma = _gev_from_lmoments(l1, l2, -xi)
    return GevParams(mu=mu, sigma=sigma, xi=xi, clamped=clamped)


def fit_margins(dataset: SpatialDataset) -> Dict[str, GevParams]:
    """Per-site PWM fits keyed by site id."""
    if dataset.n_vars != 1:
        raise InputError("margins are fitted one variable at a time")
    fits = {}
    for k, site_id in enumerate(dataset.site_ids):
        try:
            fits[site_id] = fit_gev(dataset.values[:, k])
        except EstimationError as exc:
            raise EstimationError(f"site {site_id}: {exc.detail}") from exc
    return fits


def _fit_for(fits: Fits, k: int, site_id: str) -> GevParams:
    if isinstance(fits, Mapping):
        if site_id not in fits:
            raise InputError(f"no margin fit for site {site_id}")
        return fits[site_id]
    return fits[k]


def to_unit_frechet(dataset: SpatialDataset, fits: Fits) -> SpatialDataset:
    """
    Map every observation to the unit-Frechet scale, z = -1/log G_site(y).

    Raises OutsideSupportError listing each (rep, site) cell whose fitted cdf is 0 or 1.
    """
    if dataset.n_vars != 1:
        raise InputError("to_unit_frechet works on single-variable datasets")
    if not isinstance(fits, Mapping) and len(fits) != dataset.n_sites:
        raise InputError("one margin fit per site is required")

    out = np.full(dataset.values.shape, np.nan)
    bad = []
    for k, site_id in enumerate(dataset.site_ids):
        column = dataset.values[:, k]
        observed = ~np.isnan(column)
        with np.errstate(divide="ignore"):
            log_g = np.asarray(gev_logcdf(_fit_for(fits, k, site_id), column[observed]), dtype=float)
        outside = ~(np.isfinite(log_g) & (log_g < 0))
        rows = np.flatnonzero(observed)
        bad.extend((dataset.rep_ids[r], site_id) for r in rows[outside])
        with np.errstate(divide="ignore"):
            out[rows, k] = -1.0 / log_g
    if bad:
        raise OutsideSupportError(bad)
    return dataset.with_values(out)


def pseudo_observations(dataset: SpatialDataset) -> SpatialDataset:
    """Column-wise average ranks divided by (n + 1), n the number of observed cells in the column."""
    if dataset.n_reps < 2:
        raise InputError("pseudo-observations need at least 2 replications")
    values = dataset.values
    ranks = stats.rankdata(values, method="average", axis=0, nan_policy="omit")
    counts = np.sum(~np.isnan(values), axis=0)
    pseudo = ranks / (counts + 1.0)
    return SpatialDataset(
        sites=dataset.sites, values=pseudo, rep_ids=dataset.rep_ids, variable_names=dataset.variable_names
    )


def rank_to_unit_frechet(dataset: SpatialDataset) -> SpatialDataset:
    """Rank-based unit-Frechet margins, -1/log(pseudo-observation)."""
    pseudo = pseudo_observations(dataset)
    return SpatialDataset(
        sites=dataset.sites,
        values=-1.0 / np.log(pseudo.values),
        rep_ids=dataset.rep_ids,
        variable_names=dataset.variable_names,
    )


def to_standard_gumbel(frechet: SpatialDataset) -> SpatialDataset:
    """log of a unit-Frechet field is standard Gumbel."""
    values = frechet.values
    if np.any(values[~np.isnan(values)] <= 0):
        raise InputError("unit-Frechet values must be positive")
    return SpatialDataset(
        sites=frechet.sites, values=np.log(values), rep_ids=frechet.rep_ids, variable_names=frechet.variable_names
    )


def gumbel_quantile(u):
    """Standard Gumbel quantile -log(-log u)."""
    return -np.log(-np.log(u))


def standard_gumbel_mean() -> float:
    return float(np.euler_gamma)


def gev_mean(p: GevParams) -> float:
    if p.xi >= 1:
        raise EstimationError("GEV mean is infinite for xi >= 1")
    if p.xi == 0:
        return p.mu + p.sigma * np.euler_gamma
    return p.mu + p.sigma * (special.gamma(1.0 - p.xi) - 1.0) / p.xi
