"""Bivariate copulas: distribution functions, diagonal sections, rectangle volumes, densities and samplers."""
import logging
import math

import numpy as np
from scipy import integrate, special

from extremo import config
from extremo.errors import InputError
from extremo.models import CopulaFamily
from extremo.schemas import CopulaModel

logger = logging.getLogger(__name__)

# Parameter name accepted in a copula spec string, per family
PARAM_NAMES = {
    CopulaFamily.gumbel: "alpha",
    CopulaFamily.gaussian: "rho",
    CopulaFamily.clayton: "theta",
}


def parse_copula(spec: str) -> CopulaModel:
    """Parse `independence`, `comonotone`, `gumbel:alpha=2.0`, `gaussian:rho=0.5` or `clayton:theta=1.0`."""
    name, _, rest = spec.strip().partition(":")
    try:
        family = CopulaFamily(name.strip().lower())
    except ValueError:
        raise InputError(f"unknown copula family '{name}'") from None
    if family == CopulaFamily.empirical:
        raise InputError("empirical copulas are built from data, not from a spec string")
    if family not in PARAM_NAMES:
        if rest:
            raise InputError(f"{family.value} copula takes no parameter")
        return CopulaModel(family=family)
    key, _, value = rest.partition("=")
    if key.strip() != PARAM_NAMES[family]:
        raise InputError(f"{family.value} copula needs '{PARAM_NAMES[family]}=<value>'")
    try:
        return CopulaModel(family=family, param=float(value))
    except ValueError as exc:
        raise InputError(f"invalid copula spec '{spec}': {exc}") from exc


def _probabilities(*args):
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    for arr in arrays:
        if np.any(~((arr >= 0) & (arr <= 1))):
            raise InputError("copula arguments must lie in [0, 1]")
    return arrays


def _scalar_or_array(out: np.ndarray, *args):
    return float(out) if all(np.ndim(a) == 0 for a in args) else out


def _gaussian_cdf(rho: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # C(u, v) = u * int_0^1 Phi((Phi^-1(v) - rho Phi^-1(u w)) / sqrt(1 - rho^2)) dw
    out = np.empty(u.shape)
    if rho == 0:
        return u * v
    b = special.ndtri(v)
    s = math.sqrt(1.0 - rho * rho)
    flat_u, flat_b = u.ravel(), b.ravel()

    def integrand(w):
        return special.ndtr((flat_b - rho * special.ndtri(flat_u * w)) / s)

    integral, _ = integrate.quad_vec(
        integrand, 0.0, 1.0, epsabs=config.GAUSSIAN_CDF_EPSABS, epsrel=config.GAUSSIAN_CDF_EPSREL, norm="max"
    )
    out[...] = (flat_u * integral).reshape(u.shape)
    return out


def _cdf_interior(m: CopulaModel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    family, p = m.family, m.param
    if family == CopulaFamily.independence:
        return u * v
    if family == CopulaFamily.comonotone:
        return np.minimum(u, v)
    if family == CopulaFamily.gumbel:
        return np.exp(-(((-np.log(u)) ** p + (-np.log(v)) ** p) ** (1.0 / p)))
    if family == CopulaFamily.clayton:
        return (u ** (-p) + v ** (-p) - 1.0) ** (-1.0 / p)
    if family == CopulaFamily.gaussian:
        return _gaussian_cdf(p, u, v)
    return empirical_copula(m.table, u, v)


def copula_cdf(m: CopulaModel, u, v):
    """
    C(u, v) for the model's family.

    Boundary values follow groundedness (C(u,0) = C(0,v) = 0, C(u,1) = u, C(1,v) = v) and
    every value is kept inside the Frechet-Hoeffding bounds.
    """
    uu, vv = _probabilities(u, v)
    out = np.zeros(uu.shape)
    interior = (uu > 0) & (uu < 1) & (vv > 0) & (vv < 1)
    if m.family == CopulaFamily.empirical:
        out = np.asarray(empirical_copula(m.table, uu, vv), dtype=float).reshape(uu.shape)
    else:
        if np.any(interior):
            out[interior] = _cdf_interior(m, uu[interior], vv[interior])
        top_u, top_v = (uu == 1), (vv == 1)
        out[top_u] = vv[top_u]
        out[top_v] = uu[top_v]
        out[(uu == 0) | (vv == 0)] = 0.0
        out = np.clip(out, np.maximum(uu + vv - 1.0, 0.0), np.minimum(uu, vv))
    return _scalar_or_array(out, u, v)


def rect_volume(m: CopulaModel, u1, u2, v1, v2):
    """C-volume of [u1, u2] x [v1, v2]: C(u2,v2) - C(u1,v2) - C(u2,v1) + C(u1,v1)."""
    a1, a2, b1, b2 = _probabilities(u1, u2, v1, v2)
    if np.any(a1 > a2) or np.any(b1 > b2):
        raise InputError("inverted rectangle: need u1 <= u2 and v1 <= v2")
    volume = (
        np.asarray(copula_cdf(m, a2, b2))
        - np.asarray(copula_cdf(m, a1, b2))
        - np.asarray(copula_cdf(m, a2, b1))
        + np.asarray(copula_cdf(m, a1, b1))
    )
    return _scalar_or_array(volume, u1, u2, v1, v2)


def diagonal(m: CopulaModel, u):
    """Diagonal section D(u) = C(u, u)."""
    (uu,) = _probabilities(u)
    family, p = m.family, m.param
    if family == CopulaFamily.independence:
        out = uu**2
    elif family == CopulaFamily.comonotone:
        out = uu.copy()
    elif family == CopulaFamily.gumbel:
        out = uu ** (2.0 ** (1.0 / p))
    elif family == CopulaFamily.clayton:
        with np.errstate(divide="ignore"):
            out = np.where(uu > 0, (2.0 * uu ** (-p) - 1.0) ** (-1.0 / p), 0.0)
    else:
        out = np.asarray(copula_cdf(m, uu, uu), dtype=float)
    return _scalar_or_array(out, u)


def copula_density(m: CopulaModel, u, v):
    """Copula density c(u, v) on the open unit square; comonotone and empirical copulas have none."""
    uu, vv = _probabilities(u, v)
    family, p = m.family, m.param
    if family in (CopulaFamily.comonotone, CopulaFamily.empirical):
        raise InputError(f"{family.value} copula has no density")
    if np.any((uu <= 0) | (uu >= 1) | (vv <= 0) | (vv >= 1)):
        raise InputError("copula density is evaluated on the open unit square")
    if family == CopulaFamily.independence:
        out = np.ones(uu.shape)
    elif family == CopulaFamily.gumbel:
        x, y = -np.log(uu), -np.log(vv)
        s = x**p + y**p
        a = s ** (1.0 / p)
        out = np.exp(-a) * (x * y) ** (p - 1.0) * s ** (1.0 / p - 2.0) * (a + p - 1.0) / (uu * vv)
    elif family == CopulaFamily.clayton:
        out = (1.0 + p) * (uu * vv) ** (-p - 1.0) * (uu ** (-p) + vv ** (-p) - 1.0) ** (-2.0 - 1.0 / p)
    else:
        x, y = special.ndtri(uu), special.ndtri(vv)
        r2 = 1.0 - p * p
        out = np.exp(-(p * p * (x * x + y * y) - 2.0 * p * x * y) / (2.0 * r2)) / math.sqrt(r2)
    return _scalar_or_array(out, u, v)


def empirical_copula(pseudo, u, v):
    """(1/n) #{k : U_k <= u and V_k <= v} over pseudo-observation pairs."""
    pairs = np.asarray(pseudo, dtype=float)
    if pairs.size == 0:
        raise InputError("empirical copula of an empty sample")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InputError("pseudo-observations must be an (n, 2) array")
    uu, vv = _probabilities(u, v)
    flat_u, flat_v = uu.ravel(), vv.ravel()
    counts = np.empty(flat_u.shape)
    for start in range(0, len(flat_u), 1024):
        stop = start + 1024
        hits = (pairs[None, :, 0] <= flat_u[start:stop, None]) & (pairs[None, :, 1] <= flat_v[start:stop, None])
        counts[start:stop] = hits.sum(axis=1)
    out = (counts / len(pairs)).reshape(uu.shape)
    return _scalar_or_array(out, u, v)


def positive_stable(a: float, size, rng: np.random.Generator) -> np.ndarray:
    """Positive a-stable variates with Laplace transform exp(-t^a), 0 < a <= 1 (Kanter's representation)."""
    if a == 1:
        return np.ones(size)
    theta = rng.uniform(0.0, np.pi, size)
    w = rng.standard_exponential(size)
    return (
        np.sin(a * theta)
        / np.sin(theta) ** (1.0 / a)
        * (np.sin((1.0 - a) * theta) / w) ** ((1.0 - a) / a)
    )


def sample_logistic(alpha: float, n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """(n, d) uniforms from the symmetric logistic (Gumbel) copula via a positive-stable frailty."""
    frailty = positive_stable(1.0 / alpha, n, rng)
    e = rng.standard_exponential((n, d))
    return np.exp(-((e / frailty[:, None]) ** (1.0 / alpha)))


def sample_pairs(m: CopulaModel, n: int, seed: int) -> np.ndarray:
    """n i.i.d. (u, v) pairs with uniform margins; deterministic for a fixed seed."""
    if n < 1:
        raise InputError("sample size must be >= 1")
    rng = np.random.default_rng(seed)
    family, p = m.family, m.param
    if family == CopulaFamily.independence:
        return rng.random((n, 2))
    if family == CopulaFamily.comonotone:
        u = rng.random(n)
        return np.column_stack([u, u])
    if family == CopulaFamily.gumbel:
        return sample_logistic(p, n, 2, rng)
    if family == CopulaFamily.gaussian:
        z = rng.standard_normal((n, 2))
        z[:, 1] = p * z[:, 0] + math.sqrt(1.0 - p * p) * z[:, 1]
        return special.ndtr(z)
    if family == CopulaFamily.clayton:
        frailty = rng.gamma(1.0 / p, 1.0, n)
        e = rng.standard_exponential((n, 2))
        return (1.0 + e / frailty[:, None]) ** (-1.0 / p)
    raise InputError(f"cannot sample from a {family.value} copula")
