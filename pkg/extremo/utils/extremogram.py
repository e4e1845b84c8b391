"""Copula-limit and empirical extremograms, cross-extremograms and their matrix form."""
import logging
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from extremo import config
from extremo.dataset import pairwise_complete
from extremo.errors import EstimationError, InputError
from extremo.models import CurveKind, TailSide
from extremo.schemas import CopulaModel, DependenceCurve, DistanceBins, Estimate, SpatialDataset
from extremo.utils.copulas import copula_cdf, diagonal
from extremo.utils.workers import run_parallel

logger = logging.getLogger(__name__)


class ExtremogramMatrix(NamedTuple):
    rho11: DependenceCurve
    rho22: DependenceCurve
    rho12: DependenceCurve
    rho21: DependenceCurve


def _limit_estimate(values: np.ndarray) -> Estimate:
    if not np.all(np.isfinite(values)):
        raise EstimationError("extremogram quotient is not finite along the probes")
    spread = float(np.max(np.abs(np.diff(values)))) if len(values) > 1 else 0.0
    last = float(values[-1])
    clamped = not 0.0 <= last <= 1.0
    if clamped:
        logger.warning("extremogram limit %.6g clamped into [0, 1]", last)
    return Estimate(value=min(max(last, 0.0), 1.0), clamped=clamped, spread=spread)


def _probe_array(u_seq: Sequence[float]) -> np.ndarray:
    u = np.asarray(u_seq, dtype=float)
    if u.ndim != 1 or u.size == 0:
        raise InputError("probe sequence must be a non-empty list")
    if np.any(~((u > 0) & (u < 1))):
        raise InputError("probes must lie in (0, 1)")
    return u


def extremogram_convergence(m: CopulaModel, side: TailSide, u_seq: Optional[Sequence[float]] = None) -> np.ndarray:
    """The extremogram quotient evaluated at every probe."""
    side = TailSide(side)
    if u_seq is None:
        u_seq = config.UPPER_PROBES if side == TailSide.upper else config.LOWER_PROBES
    u = _probe_array(u_seq)
    d = np.asarray(diagonal(m, u), dtype=float)
    if side == TailSide.upper:
        return 2.0 - (1.0 - d) / (1.0 - u)
    return d / u


def extremogram_copula(m: CopulaModel, side: TailSide, u_seq: Optional[Sequence[float]] = None) -> Estimate:
    """
    Copula-limit extremogram.

    Upper: rho = 2 - lim_{u -> 1} (1 - C(u,u)) / (1 - u); lower: rho = lim_{u -> 0} C(u,u) / u.
    The value is the quotient at the last probe; `spread` is the largest successive difference.
    """
    return _limit_estimate(extremogram_convergence(m, side, u_seq))


def cross_extremogram_copula(
    m: CopulaModel, u1_seq: Optional[Sequence[float]] = None, u2_seq: Optional[Sequence[float]] = None
) -> Estimate:
    """
    Cross-extremogram rho_AB = 1 - lim (u2 - C(u1, u2)) / (1 - u1) along the paired path (u1_k, u2_k).
    """
    u1 = _probe_array(config.UPPER_PROBES if u1_seq is None else u1_seq)
    u2 = _probe_array(config.UPPER_PROBES if u2_seq is None else u2_seq)
    if u1.shape != u2.shape:
        raise InputError("paired probe lists must have equal length")
    c = np.asarray(copula_cdf(m, u1, u2), dtype=float)
    return _limit_estimate(1.0 - (u2 - c) / (1.0 - u1))


def _exceedances(values: np.ndarray, q: float, side: TailSide) -> np.ndarray:
    """Exceedance indicators (1.0 or 0.0) against each column's empirical quantile; missing cells stay NaN."""
    if not 0.5 < q < 1:
        raise InputError("extremogram level q must lie in (0.5, 1)")
    with np.errstate(invalid="ignore"):
        if side == TailSide.upper:
            hits = values > np.nanquantile(values, q, axis=0)
        else:
            hits = values < np.nanquantile(values, 1.0 - q, axis=0)
    return np.where(np.isnan(values), np.nan, hits.astype(float))


def _check_levels(values: np.ndarray):
    if values.shape[0] < 2:
        raise InputError("the extremogram needs at least 2 replications")


def _pooled_counts(hits: np.ndarray, pairs: np.ndarray) -> Tuple[int, int]:
    joint, conditioning = 0, 0
    for i, j in pairs:
        a, b = (column > 0 for column in pairwise_complete(hits, i, j))
        joint += 2 * int(np.count_nonzero(a & b))
        conditioning += int(np.count_nonzero(a)) + int(np.count_nonzero(b))
    return joint, conditioning


def _directed_counts(hits_x: np.ndarray, hits_y: np.ndarray, pairs: np.ndarray) -> Tuple[int, int]:
    # x is the first site of the pair, x + h the second
    joint, conditioning = 0, 0
    for i, j in pairs:
        a, b = (column > 0 for column in pairwise_complete(hits_x, i, j, hits_y))
        joint += int(np.count_nonzero(a & b))
        conditioning += int(np.count_nonzero(a))
    return joint, conditioning


def orient_pairs(dataset: SpatialDataset, pairs: np.ndarray) -> np.ndarray:
    """
    Reorder each pair (i, j) so that its first site is the one with the smaller (x, y) coordinates.

    Coordinate ties fall back to the site id, so the orientation never depends on the order of the sites.
    """
    keys = [(site.x, site.y, site.id) for site in dataset.sites]
    oriented = np.array(pairs, dtype=int).reshape(-1, 2)
    swap = np.array([keys[j] < keys[i] for i, j in oriented], dtype=bool)
    oriented[swap] = oriented[swap][:, ::-1]
    return oriented


def _curve(bins: DistanceBins, counts, kind: CurveKind) -> DependenceCurve:
    estimates = []
    for center, n, (joint, conditioning) in zip(bins.centers, bins.n_pairs, counts):
        if conditioning == 0:
            if n:
                logger.warning("no conditioning exceedance in the bin at %.6g", center)
            estimates.append(None)
        else:
            estimates.append(joint / conditioning)
    return DependenceCurve(bin_centers=bins.centers, estimates=estimates, n_pairs=bins.n_pairs, kind=kind)


def empirical_extremogram(
    dataset: SpatialDataset, bins: DistanceBins, q: float, side: TailSide = TailSide.upper, threads: int = 1
) -> DependenceCurve:
    """
    Finite-level extremogram per bin.

    Joint exceedances over conditioning exceedances, both orientations of every pair pooled, each
    site judged against its own empirical q-quantile (1 - q for the lower side).
    """
    if dataset.n_vars != 1:
        raise InputError("use extremogram_matrix for multi-variable datasets")
    side = TailSide(side)
    _check_levels(dataset.values)
    hits = _exceedances(dataset.values, q, side)
    counts = run_parallel(lambda pairs: _pooled_counts(hits, pairs), bins.pairs_per_bin, threads)
    return _curve(bins, counts, CurveKind.extremogram)


def extremogram_matrix(
    dataset2: SpatialDataset, bins: DistanceBins, q: float, threads: int = 1
) -> ExtremogramMatrix:
    """
    The four curves rho11, rho22, rho12, rho21 of a two-variable dataset (upper tail).

    Diagonal terms pool pair orientation. Cross terms orient every pair with `orient_pairs`:
    rho12(h) conditions on variable 1 exceeding at the first site and counts variable 2
    exceeding at the second, rho21 swaps the variables.
    """
    if dataset2.n_vars != 2:
        raise InputError("extremogram_matrix needs exactly 2 variables per site")
    _check_levels(dataset2.values)
    hits1, hits2 = (_exceedances(dataset2.values[:, :, k], q, TailSide.upper) for k in range(2))
    oriented = [orient_pairs(dataset2, pairs) for pairs in bins.pairs_per_bin]

    def same(hits):
        return run_parallel(lambda pairs: _pooled_counts(hits, pairs), bins.pairs_per_bin, threads)

    def cross(hx, hy):
        return run_parallel(lambda pairs: _directed_counts(hx, hy, pairs), oriented, threads)

    return ExtremogramMatrix(
        rho11=_curve(bins, same(hits1), CurveKind.extremogram),
        rho22=_curve(bins, same(hits2), CurveKind.extremogram),
        rho12=_curve(bins, cross(hits1, hits2), CurveKind.cross_extremogram),
        rho21=_curve(bins, cross(hits2, hits1), CurveKind.cross_extremogram),
    )
