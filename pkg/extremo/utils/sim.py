"""Synthetic spatial fields with known extremal dependence."""
import logging
import math
from typing import Sequence

import numpy as np
from scipy import linalg, special
from tqdm import tqdm

from extremo import config
from extremo.errors import InputError
from extremo.models import SimKind
from extremo.schemas import SimSpec, Site, SpatialDataset
from extremo.utils.copulas import positive_stable
from extremo.utils.workers import run_parallel

logger = logging.getLogger(__name__)


def smith_theta(h, sigma: float):
    """Pairwise extremal coefficient 2 Phi(|h| / (2 sigma)) of the isotropic Gaussian-storm model."""
    return 2.0 * special.ndtr(np.abs(np.asarray(h, dtype=float)) / (2.0 * sigma))


def gaussian_field_eta(d, range_r: float):
    """Coefficient of tail dependence (1 + rho) / 2 of the exponential-correlogram Gaussian field."""
    return (1.0 + np.exp(-np.asarray(d, dtype=float) / range_r)) / 2.0


def _distances(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


class _SmithStorms:
    """Truncated spectral construction Z(s) = max_k zeta_k phi(s - U_k) on a padded window."""

    def __init__(self, coords: np.ndarray, sigma: float, radius: float):
        self.coords = coords
        self.sigma = sigma
        self.low = coords.min(axis=0) - radius
        self.high = coords.max(axis=0) + radius
        self.area = float(np.prod(self.high - self.low))
        self.peak = 1.0 / (2.0 * math.pi * sigma**2)  # storm density at its centre

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        n_sites = len(self.coords)
        z = np.zeros((size, n_sites))
        arrival = np.zeros(size)
        active = np.ones(size, dtype=bool)
        while active.any():
            idx = np.flatnonzero(active)
            batch = int(min(config.SMITH_STORM_BATCH, max(4, 4_000_000 // (len(idx) * n_sites))))
            gamma = arrival[idx, None] + np.cumsum(rng.standard_exponential((len(idx), batch)), axis=1)
            arrival[idx] = gamma[:, -1]
            centers = rng.uniform(self.low, self.high, (len(idx), batch, 2))
            d2 = np.sum((self.coords[None, None, :, :] - centers[:, :, None, :]) ** 2, axis=-1)
            storms = (self.area / gamma)[:, :, None] * self.peak * np.exp(-d2 / (2.0 * self.sigma**2))
            z[idx] = np.maximum(z[idx], storms.max(axis=1))
            # later storms are weaker than area / arrival; stop once none can raise any site
            active[idx] = self.area / arrival[idx] * self.peak >= z[idx].min(axis=1)
        return z


def _block_sampler(spec: SimSpec, coords: np.ndarray):
    n_sites = len(coords)
    if spec.kind == SimKind.iid_frechet:
        return lambda size, rng: 1.0 / rng.standard_exponential((size, n_sites))

    if spec.kind == SimKind.gaussian_copula_field:
        cov = np.exp(-_distances(coords) / spec.range_r) + 1e-10 * np.eye(n_sites)
        factor = linalg.cholesky(cov, lower=True)

        def gaussian(size, rng):
            y = rng.standard_normal((size, n_sites)) @ factor.T
            return -1.0 / special.log_ndtr(y)

        return gaussian

    if spec.kind == SimKind.logistic_pairs:
        alpha = spec.alpha

        def logistic(size, rng):
            frailty = positive_stable(1.0 / alpha, size, rng)
            e = rng.standard_exponential((size, n_sites))
            # -1 / log U with U = exp(-(E/S)^(1/alpha))
            return (frailty[:, None] / e) ** (1.0 / alpha)

        return logistic

    radius = spec.truncation_radius
    if radius is None:
        radius = config.SMITH_DEFAULT_RADIUS * spec.storm_sigma
    if radius < 3.0 * spec.storm_sigma:
        logger.warning("truncation radius %.3g is under 3 storm scales; margins near the edge will be biased", radius)
    return _SmithStorms(coords, spec.storm_sigma, radius).draw


def _check_margins(z: np.ndarray, kind: SimKind):
    if len(z) < 1000:
        return
    # 1/Z is standard exponential under unit-Frechet margins
    deviation = np.abs(np.mean(1.0 / z, axis=0) - 1.0)
    worst = int(np.argmax(deviation))
    if deviation[worst] > config.SIM_MARGIN_TOLERANCE:
        logger.warning(
            "%s margins deviate from unit Frechet by %.1f%% at site index %d; widen the truncation window",
            kind.value,
            100 * deviation[worst],
            worst,
        )


def simulate(spec: SimSpec, sites: Sequence[Site], threads: int = 1, progress: bool = False) -> SpatialDataset:
    """
    Draw spec.n_reps replications on unit-Frechet margins.

    Replications come in fixed-size blocks, each with its own generator spawned from the seed,
    so the output is the same for any number of threads.
    """
    sites = tuple(sites)
    if not sites:
        raise InputError("simulation needs at least one site")
    coords = np.array([[s.x, s.y] for s in sites], dtype=float)
    sampler = _block_sampler(spec, coords)

    block = config.SIM_BLOCK_SIZE
    sizes = [min(block, spec.n_reps - start) for start in range(0, spec.n_reps, block)]
    streams = np.random.SeedSequence(spec.seed).spawn(len(sizes))
    bar = tqdm(total=len(sizes), desc=spec.kind.value, unit="block", disable=not progress)

    def draw(job):
        size, stream = job
        out = sampler(size, np.random.default_rng(stream))
        bar.update(1)
        return out

    try:
        values = np.concatenate(run_parallel(draw, list(zip(sizes, streams)), threads), axis=0)
    finally:
        bar.close()

    if spec.kind == SimKind.smith_storm:
        _check_margins(values, spec.kind)
    rep_ids = tuple(str(k + 1) for k in range(spec.n_reps))
    return SpatialDataset(sites=sites, values=values, rep_ids=rep_ids)


def max_over_replications(dataset: SpatialDataset, m: int) -> SpatialDataset:
    """Component-wise maxima of consecutive blocks of m replications, rescaled by 1/m."""
    if m < 1:
        raise InputError("block length must be >= 1")
    n_blocks = dataset.n_reps // m
    if n_blocks < 1:
        raise InputError("fewer replications than the block length")
    values = dataset.values[: n_blocks * m].reshape(n_blocks, m, *dataset.values.shape[1:])
    rep_ids = tuple(str(k + 1) for k in range(n_blocks))
    return SpatialDataset(sites=dataset.sites, values=values.max(axis=1) / m, rep_ids=rep_ids)
