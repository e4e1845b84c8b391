import enum


# Parametric families (plus the empirical table) a CopulaModel can carry
class CopulaFamily(str, enum.Enum):
    independence = "independence"
    comonotone = "comonotone"
    gumbel = "gumbel"  # alpha >= 1, extremal (max-stable)
    gaussian = "gaussian"  # rho in (-1, 1), asymptotically independent
    clayton = "clayton"  # theta > 0, lower-tail dependent
    empirical = "empirical"


# Which tail an extremogram looks at
class TailSide(str, enum.Enum):
    upper = "upper"
    lower = "lower"


# Direction of an N_k-discordance degree
class Direction(str, enum.Enum):
    upper = "upper"
    lower = "lower"


# Hill / likelihood formula variant
class FitMode(str, enum.Enum):
    standard = "standard"  # classical Ledford-Tawn forms
    paper_literal = "paper_literal"  # printed forms, kept for formula fidelity


# How a threshold probability level becomes u_h on the Frechet scale
class ThresholdBasis(str, enum.Enum):
    marginal = "marginal"  # u_h = -1/log(q)
    structure = "structure"  # u_h = empirical q-quantile of W


# Standard margins accepted by theta_from_madogram
class StandardMargin(str, enum.Enum):
    standard_gumbel = "standard_gumbel"
    standard_weibull = "standard_weibull"


class CurveKind(str, enum.Enum):
    madogram = "madogram"
    theta = "theta"
    variogram = "variogram"
    covariogram = "covariogram"
    extremogram = "extremogram"
    cross_extremogram = "cross_extremogram"


class SimKind(str, enum.Enum):
    iid_frechet = "iid_frechet"
    gaussian_copula_field = "gaussian_copula_field"
    smith_storm = "smith_storm"
    logistic_pairs = "logistic_pairs"


class Command(str, enum.Enum):
    fit_margins = "fit-margins"
    transform = "transform"
    madogram = "madogram"
    extremal_coeff = "extremal-coeff"
    extremogram = "extremogram"
    cross_extremogram = "cross-extremogram"
    taildep = "taildep"
    discordance = "discordance"
    simulate = "simulate"
    theta_copula = "theta-copula"
