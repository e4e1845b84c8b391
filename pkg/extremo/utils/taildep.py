"""Ledford-Tawn tail dependence: structure variable, Hill-type eta, scale c, censored likelihood, extremal variogram."""
import logging
import math
from typing import List, Optional

import numpy as np
from scipy import optimize

from extremo import config
from extremo.dataset import pairwise_complete
from extremo.errors import EstimationError, InputError
from extremo.models import FitMode, ThresholdBasis
from extremo.schemas import DistanceBins, Estimate, SpatialDataset, TailDepFit
from extremo.utils.workers import run_parallel

logger = logging.getLogger(__name__)


def frechet_threshold(q: float) -> float:
    """Unit-Frechet q-quantile -1/log(q)."""
    if not 0 < q < 1:
        raise InputError("threshold level must lie in (0, 1)")
    return -1.0 / math.log(q)


def structure_variable(z_pairs) -> np.ndarray:
    """W = min of each unit-Frechet pair."""
    z = np.asarray(z_pairs, dtype=float)
    if z.ndim != 2 or z.shape[1] != 2:
        raise InputError("structure variable needs an (n, 2) array of pairs")
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise InputError("pairs must be positive and finite (unit-Frechet scale)")
    return z.min(axis=1)


def _exceedances(w, u_h: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if not u_h > 0:
        raise InputError("threshold u_h must be > 0")
    return w[w > u_h]


def _clamp_eta(eta: float) -> Estimate:
    clamped = not config.ETA_FLOOR <= eta <= 1.0
    if clamped:
        logger.warning("eta estimate %.6g clamped into (0, 1]", eta)
    return Estimate(value=min(max(eta, config.ETA_FLOOR), 1.0), clamped=clamped)


def negative_hill_terms(w, u_h: float, mode: FitMode = FitMode.standard) -> int:
    """Exceedances whose Hill summand is negative; only paper_literal summands (w < 2 u_h) can be."""
    if FitMode(mode) == FitMode.standard:
        return 0
    excess = _exceedances(w, u_h)
    return int(np.count_nonzero(excess < 2.0 * u_h))


def fit_eta(w, u_h: float, mode: FitMode = FitMode.standard) -> Estimate:
    """
    Hill-type estimate of eta from the exceedances of W over u_h.

    standard: mean of log(w / u_h); paper_literal: mean of log((w - u_h) / u_h), whose summands
    are negative for w < 2 u_h. Both are clamped into (0, 1] and flagged.
    """
    mode = FitMode(mode)
    excess = _exceedances(w, u_h)
    if len(excess) < config.MIN_EXCEEDANCES:
        raise EstimationError(
            f"only {len(excess)} exceedance(s) of u_h = {u_h:.6g}, need {config.MIN_EXCEEDANCES}"
        )
    if mode == FitMode.standard:
        terms = np.log(excess / u_h)
    else:
        terms = np.log((excess - u_h) / u_h)
        negative = negative_hill_terms(excess, u_h, mode)
        if negative:
            logger.warning("%d paper-literal Hill summand(s) are negative (w < 2 u_h)", negative)
    return _clamp_eta(float(np.mean(terms)))


def fit_scale_c(n_total: int, n_exceed: int, u_h: float, eta_hat: float) -> float:
    """c_h = (n_u / n) u_h^(1/eta)."""
    if n_exceed <= 0:
        raise EstimationError("no exceedance to estimate c from")
    if n_exceed > n_total:
        raise InputError("n_exceed cannot exceed n_total")
    if not 0 < eta_hat <= 1:
        raise InputError("eta must lie in (0, 1]")
    if not u_h > 0:
        raise InputError("threshold u_h must be > 0")
    try:
        return n_exceed * u_h ** (1.0 / eta_hat) / n_total
    except OverflowError:
        raise EstimationError(f"c overflows at eta = {eta_hat:.6g}") from None


def censored_loglik(c: float, eta: float, w, u_h: float, mode: FitMode = FitMode.standard) -> float:
    """
    Censored log-likelihood of the tail model P(W > w) = c w^(-1/eta) above u_h.

    paper_literal: (n - n_u) log(1 - c/u_h^(1/eta)) + n_u log(c/eta - c) - (1/eta) sum w_i
    standard: (n - n_u) log(1 - c/u_h^(1/eta)) + n_u log(c/eta) - n_u (1/eta + 1) log u_h
              - (1/eta + 1) sum log(w_i / u_h)
    Sums run over the exceedances w_i > u_h; n is the full sample size.
    """
    mode = FitMode(mode)
    w = np.asarray(w, dtype=float)
    if not (c > 0 and 0 < eta <= 1 and u_h > 0):
        raise EstimationError("likelihood parameters outside (c > 0, 0 < eta <= 1, u_h > 0)")
    tail = c / u_h ** (1.0 / eta)
    if not tail < 1:
        raise EstimationError("c / u_h^(1/eta) must be < 1")
    excess = w[w > u_h]
    n, n_u = len(w), len(excess)
    censored = (n - n_u) * math.log1p(-tail) if n > n_u else 0.0
    if mode == FitMode.paper_literal:
        if eta == 1:
            raise EstimationError("log(c/eta - c) is undefined at eta = 1")
        return censored + n_u * math.log(c / eta - c) - float(np.sum(excess)) / eta
    return (
        censored
        + n_u * math.log(c / eta)
        - n_u * (1.0 / eta + 1.0) * math.log(u_h)
        - (1.0 / eta + 1.0) * float(np.sum(np.log(excess / u_h)))
    )


def fit_censored_likelihood(w, u_h: float, mode: FitMode = FitMode.standard) -> TailDepFit:
    """Maximise censored_loglik jointly over (c, eta), started from the Hill / closed-form estimates."""
    mode = FitMode(mode)
    w = np.asarray(w, dtype=float)
    start = fit_eta(w, u_h, mode)
    n_u = int(np.count_nonzero(w > u_h))
    eta0 = min(start.value, 0.99)
    c0 = fit_scale_c(len(w), n_u, u_h, eta0)

    def objective(theta):
        # unconstrained coordinates: log c and logit eta
        c, eta = math.exp(theta[0]), 1.0 / (1.0 + math.exp(-theta[1]))
        try:
            return -censored_loglik(c, eta, w, u_h, mode)
        except (EstimationError, ValueError, OverflowError):
            return np.inf

    x0 = np.array([math.log(c0), math.log(eta0 / (1.0 - eta0))])
    result = optimize.minimize(objective, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12})
    if not np.isfinite(result.fun):
        raise EstimationError("censored likelihood maximisation failed")
    eta = 1.0 / (1.0 + math.exp(-result.x[1]))
    return TailDepFit(
        eta_hat=eta,
        c_hat=math.exp(result.x[0]),
        u_h=u_h,
        n_exceed=n_u,
        n_total=len(w),
        mode=mode,
        negative_terms=negative_hill_terms(w, u_h, mode),
    )


def model_extremogram(c: float, eta: float, u: float) -> float:
    """rho(u) = c u^(1 - 1/eta) with u a unit-Frechet threshold."""
    if not c > 0:
        raise InputError("c must be > 0")
    if not 0 < eta <= 1:
        raise InputError("eta must lie in (0, 1]")
    if not u > 1:
        raise InputError("u must be > 1 on the unit-Frechet scale")
    return c * u ** (1.0 - 1.0 / eta)


def extremal_variogram(eta: float) -> float:
    """gamma_E = 2 (1 - eta)."""
    if not 0 < eta <= 1:
        raise InputError("eta must lie in (0, 1]")
    return 2.0 * (1.0 - eta)


def eta_from_variogram(gamma_e: float) -> float:
    if not 0 <= gamma_e < 2:
        raise InputError("extremal variogram must lie in [0, 2)")
    return 1.0 - gamma_e / 2.0


def variogram_exponent(gamma_e: float) -> float:
    """-gamma_E / (2 - gamma_E), equal to 1 - 1/eta."""
    if not 0 <= gamma_e < 2:
        raise InputError("extremal variogram must lie in [0, 2)")
    return -gamma_e / (2.0 - gamma_e)


def model_extremogram_from_variogram(c: float, gamma_e: float, u: float) -> float:
    if not c > 0:
        raise InputError("c must be > 0")
    if not u > 1:
        raise InputError("u must be > 1 on the unit-Frechet scale")
    return c * u ** variogram_exponent(gamma_e)


def fit_tail_dependence(
    w,
    threshold_q: float,
    mode: FitMode = FitMode.standard,
    basis: ThresholdBasis = ThresholdBasis.marginal,
) -> TailDepFit:
    """
    eta_hat and c_hat from a sample of W at threshold level q.

    basis=marginal puts u_h at the unit-Frechet q-quantile; basis=structure at the empirical
    q-quantile of W itself.
    """
    w = np.asarray(w, dtype=float)
    if len(w) == 0:
        raise EstimationError("empty structure-variable sample")
    if ThresholdBasis(basis) == ThresholdBasis.marginal:
        u_h = frechet_threshold(threshold_q)
    else:
        if not 0 < threshold_q < 1:
            raise InputError("threshold level must lie in (0, 1)")
        u_h = float(np.quantile(w, threshold_q))
    eta = fit_eta(w, u_h, mode)
    n_u = int(np.count_nonzero(w > u_h))
    return TailDepFit(
        eta_hat=eta.value,
        c_hat=fit_scale_c(len(w), n_u, u_h, eta.value),
        u_h=u_h,
        n_exceed=n_u,
        n_total=len(w),
        mode=FitMode(mode),
        clamped=eta.clamped,
        negative_terms=negative_hill_terms(w, u_h, mode),
    )


def _bin_structure(values: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    chunks = []
    for i, j in pairs:
        a, b = pairwise_complete(values, i, j)
        chunks.append(np.minimum(a, b))
    return np.concatenate(chunks) if chunks else np.empty(0)


def taildep_curve(
    frechet: SpatialDataset,
    bins: DistanceBins,
    threshold_q: float,
    mode: FitMode = FitMode.standard,
    basis: ThresholdBasis = ThresholdBasis.marginal,
    threads: int = 1,
) -> List[Optional[TailDepFit]]:
    """One tail fit per bin, pooling W over the bin's pairs and replications; None where a fit is impossible."""
    if frechet.n_vars != 1:
        raise InputError("tail dependence works on single-variable datasets")
    values = frechet.values
    if np.any(values[~np.isnan(values)] <= 0):
        raise InputError("unit-Frechet values must be positive")

    def fit(pairs) -> Optional[TailDepFit]:
        w = _bin_structure(values, pairs)
        if len(w) == 0:
            return None
        try:
            return fit_tail_dependence(w, threshold_q, mode, basis)
        except EstimationError as exc:
            logger.warning("tail fit skipped for a bin: %s", exc.detail)
            return None

    return run_parallel(fit, bins.pairs_per_bin, threads)
