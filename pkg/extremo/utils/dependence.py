"""Madograms, extremal coefficients and copula covariograms/variograms."""
import logging
import math
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from extremo import config
from extremo.dataset import pairwise_complete
from extremo.errors import EstimationError, InputError
from extremo.models import CopulaFamily, CurveKind, StandardMargin
from extremo.schemas import CopulaModel, DependenceCurve, DistanceBins, Estimate, GevParams, SpatialDataset
from extremo.utils import margins
from extremo.utils.copulas import copula_density, diagonal
from extremo.utils.workers import run_parallel

logger = logging.getLogger(__name__)

QuantileFn = Callable[[np.ndarray], np.ndarray]
Margin = Union[GevParams, StandardMargin, str]


def _bin_madogram(values: np.ndarray, pairs: np.ndarray) -> Optional[float]:
    total, count = 0.0, 0
    # fixed (i, j) order keeps the sum bit-identical whatever the worker count
    for i, j in pairs:
        a, b = pairwise_complete(values, i, j)
        total += float(np.sum(np.abs(a - b)))
        count += a.size
    if count == 0:
        return None
    return total / (2.0 * count)


def empirical_madogram(dataset: SpatialDataset, bins: DistanceBins, threads: int = 1) -> DependenceCurve:
    """
    Per-bin madogram M(h) = E|Z(x+h) - Z(x)| / 2, averaged over the bin's pairs and replications.

    The dataset must already be on a common margin scale. Bins without pairs get a None estimate.
    """
    if dataset.n_vars != 1:
        raise InputError("the madogram works on single-variable datasets")
    if dataset.n_reps < 2:
        raise InputError("the madogram needs at least 2 replications")
    if sum(bins.n_pairs) == 0:
        raise EstimationError("every distance bin is empty")

    values = dataset.values
    estimates = run_parallel(lambda pairs: _bin_madogram(values, pairs), bins.pairs_per_bin, threads)
    for center, estimate, n in zip(bins.centers, estimates, bins.n_pairs):
        if estimate is None and n:
            logger.warning("bin at %.6g has pairs but no jointly observed replications", center)
    return DependenceCurve(
        bin_centers=bins.centers, estimates=estimates, n_pairs=bins.n_pairs, kind=CurveKind.madogram
    )


def _diagonal_stieltjes(m: CopulaModel, quantile_fn: QuantileFn, eps: float, cells: int) -> Tuple[float, float]:
    """int F^-1(u) dD(u) over [eps, 1 - eps] plus endpoint-weighted tails; returns (value, tail size)."""
    grid = special.expit(np.linspace(special.logit(eps), special.logit(1.0 - eps), cells + 1))
    d = np.asarray(diagonal(m, grid), dtype=float)
    mid = 0.5 * (grid[:-1] + grid[1:])
    q_mid = np.asarray(quantile_fn(mid), dtype=float)
    q_ends = np.asarray(quantile_fn(grid[[0, -1]]), dtype=float)
    if not (np.all(np.isfinite(q_mid)) and np.all(np.isfinite(q_ends))):
        raise EstimationError("quantile function is not finite on the truncated range")
    body = float(np.sum(q_mid * np.diff(d)))
    lower_mass, upper_mass = d[0], 1.0 - d[-1]
    tails = q_ends[0] * lower_mass + q_ends[1] * upper_mass
    bound = abs(q_ends[0]) * lower_mass + abs(q_ends[1]) * upper_mass
    return body + float(tails), float(bound)


def copula_madogram(
    m: CopulaModel,
    quantile_fn: QuantileFn,
    mu: float,
    eps: float = config.MADOGRAM_EPS,
    cells: int = config.MADOGRAM_CELLS,
) -> float:
    """
    Copula madogram M(h) = int_0^1 F^-1(u) dC_h(u, u) - mu.

    Parameters:
    - m: copula of the pair at lag h.
    - quantile_fn: margin quantile F^-1, vectorised.
    - mu: margin mean.
    - eps: truncation of the diagonal measure at both ends.
    - cells: number of cells partitioning [eps, 1 - eps] (uniform in logit(u)).

    Returns:
    - M(h); the contribution approximated on the two truncated tails is logged at DEBUG.
    """
    if m.family == CopulaFamily.comonotone:
        # max(Z, Z) = Z
        return 0.0
    if not math.isfinite(mu):
        raise EstimationError("margin mean must be finite")
    value, bound = _diagonal_stieltjes(m, quantile_fn, eps, cells)
    logger.debug("copula madogram tail contribution bounded by %.3g", bound)
    return value - mu


def _clamp_theta(theta: float) -> Estimate:
    if not math.isfinite(theta):
        raise EstimationError("extremal coefficient is not finite")
    clamped = not 1.0 <= theta <= 2.0
    if clamped:
        logger.warning("extremal coefficient %.6g clamped into [1, 2]", theta)
    return Estimate(value=min(max(theta, 1.0), 2.0), clamped=clamped)


def theta_from_madogram(M: float, margin: Margin) -> Estimate:
    """
    Pairwise extremal coefficient from a madogram value.

    - standard_gumbel: theta = exp(M)
    - standard_weibull: theta = 1 / (1 - M), needs M < 1
    - GEV with xi = 0: theta = exp(M / sigma)
    - GEV with xi != 0: theta = u_beta(mu + M / Gamma(1 - xi)), u_beta(z) = [1 + xi (z - mu)/sigma]^(1/xi)
      on its support and 0 elsewhere; needs xi < 1.
    """
    if not math.isfinite(M):
        raise EstimationError("madogram value is not finite")
    if isinstance(margin, str) and not isinstance(margin, StandardMargin):
        try:
            margin = StandardMargin(margin)
        except ValueError:
            raise InputError(f"unknown standard margin '{margin}'") from None

    if margin == StandardMargin.standard_gumbel:
        return _clamp_theta(math.exp(M))
    if margin == StandardMargin.standard_weibull:
        if M >= 1:
            raise EstimationError("madogram must be < 1 for standard Weibull margins")
        return _clamp_theta(1.0 / (1.0 - M))

    p = margin
    if p.xi >= 1:
        raise EstimationError("madogram undefined, Gamma(1 - xi) diverges for xi >= 1")
    if p.xi == 0:
        return _clamp_theta(math.exp(M / p.sigma))
    z = p.mu + M / special.gamma(1.0 - p.xi)
    base = 1.0 + p.xi * (z - p.mu) / p.sigma
    u_beta = base ** (1.0 / p.xi) if base > 0 else 0.0
    return _clamp_theta(u_beta)


def theta_from_copula(m: CopulaModel, probes: Sequence[float] = config.THETA_PROBES) -> Estimate:
    """
    Extremal coefficient from the diagonal, theta(p) = log D(p) / log p, averaged over probes.

    `spread` is max - min across probes; for an extremal copula it is at rounding level.
    """
    p = np.asarray(probes, dtype=float)
    if p.size < 3:
        raise InputError("theta_from_copula needs at least 3 probes")
    if np.any(~((p > 0) & (p < 1))):
        raise InputError("probes must lie in (0, 1)")
    d = np.asarray(diagonal(m, p), dtype=float)
    if np.any(d <= 0):
        raise EstimationError("diagonal section vanishes at a probe")
    theta = np.log(d) / np.log(p)
    spread = float(theta.max() - theta.min())
    if spread > config.EXTREMAL_SPREAD_TOL:
        logger.warning("theta varies across probes (spread %.3g): %s is not extremal", spread, m.label)
    return Estimate(value=float(theta.mean()), spread=spread)


def theta_m_logistic(alpha: float, subset_size: int) -> float:
    """Extremal coefficient k^(1/alpha) of k sites under the symmetric logistic model."""
    if not alpha >= 1:
        raise InputError("logistic dependence needs alpha >= 1")
    if subset_size < 1:
        raise InputError("subset size must be >= 1")
    return float(subset_size ** (1.0 / alpha))


def empirical_theta_subset(frechet: SpatialDataset, site_indices: Sequence[int]) -> float:
    """
    Multi-site extremal coefficient from unit-Frechet data.

    max over the subset is Frechet with scale theta, so 1/max is exponential with rate theta;
    replications with a missing cell in the subset are skipped.
    """
    idx = sorted(set(int(i) for i in site_indices))
    if not idx:
        raise InputError("empty site subset")
    block = frechet.values[:, idx]
    block = block[~np.isnan(block).any(axis=1)]
    if len(block) == 0:
        raise EstimationError("no replication observes the whole subset")
    if np.any(block <= 0):
        raise InputError("unit-Frechet values must be positive")
    return float(len(block) / np.sum(1.0 / block.max(axis=1)))


def _legendre_grid(eps: float, nodes: int):
    x, w = special.roots_legendre(nodes)
    half = (1.0 - 2.0 * eps) / 2.0
    return eps + half * (x + 1.0), w * half


def copula_covariogram(
    m: CopulaModel,
    quantile_i: QuantileFn,
    quantile_j: QuantileFn,
    mean_i: float,
    mean_j: float,
    eps: float = config.COVARIOGRAM_EPS,
    nodes: int = config.COVARIOGRAM_NODES,
) -> float:
    """Covariance int int F_i^-1(u) F_j^-1(v) c(u, v) du dv - m_i m_j; comonotone pairs use the diagonal integral."""
    if m.family == CopulaFamily.comonotone:
        value, _ = integrate.quad(lambda u: float(quantile_i(u)) * float(quantile_j(u)), 0.0, 1.0, limit=200)
        return value - mean_i * mean_j
    if m.family == CopulaFamily.empirical:
        raise InputError("empirical copulas have no density for the covariogram")
    u, w = _legendre_grid(eps, nodes)
    density = np.asarray(copula_density(m, u[:, None], u[None, :]), dtype=float)
    qi = np.asarray(quantile_i(u), dtype=float)
    qj = np.asarray(quantile_j(u), dtype=float)
    return float(np.einsum("a,b,ab->", w * qi, w * qj, density)) - mean_i * mean_j


def copula_variogram(
    m: CopulaModel,
    quantile_i: QuantileFn,
    quantile_j: QuantileFn,
    mean_i: float,
    mean_j: float,
    var_i: float,
    var_j: float,
    **kwargs,
) -> float:
    """Variogram sigma_i^2 + sigma_j^2 - 2 c_ij from the copula covariogram."""
    return var_i + var_j - 2.0 * copula_covariogram(m, quantile_i, quantile_j, mean_i, mean_j, **kwargs)


def extremal_coefficient_curve(
    dataset: SpatialDataset, bins: DistanceBins, margin: str = "gev", threads: int = 1
) -> DependenceCurve:
    """
    Madogram-based extremal coefficient per distance bin.

    margin:
    - "gev": one GEV fitted to all observations (stationary field), raw-scale madogram, GEV branch
    - "frechet": data already unit-Frechet; log-transformed to standard Gumbel first
    - "gumbel" / "weibull": data already on the standard Gumbel / Weibull scale
    """
    if margin == "gev":
        observed = dataset.values[~np.isnan(dataset.values)]
        params: Margin = margins.fit_gev(observed)
        scaled = dataset
    elif margin == "frechet":
        params, scaled = StandardMargin.standard_gumbel, margins.to_standard_gumbel(dataset)
    elif margin == "gumbel":
        params, scaled = StandardMargin.standard_gumbel, dataset
    elif margin == "weibull":
        params, scaled = StandardMargin.standard_weibull, dataset
    else:
        raise InputError(f"unknown margin '{margin}' (choose gev, frechet, gumbel or weibull)")

    madogram = empirical_madogram(scaled, bins, threads)
    estimates, flags = [], []
    for value in madogram.estimates:
        if value is None:
            estimates.append(None)
            flags.append(False)
            continue
        theta = theta_from_madogram(value, params)
        estimates.append(theta.value)
        flags.append(theta.clamped)
    return DependenceCurve(
        bin_centers=madogram.bin_centers,
        estimates=estimates,
        n_pairs=madogram.n_pairs,
        kind=CurveKind.theta,
        clamped=flags,
    )
