import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from extremo.errors import InputError
from extremo.models import (
    Command,
    CopulaFamily,
    CurveKind,
    Direction,
    FitMode,
    SimKind,
    TailSide,
    ThresholdBasis,
)


def _read_only(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


# A measurement location on the planar grid
class Site(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str  # Unique identifier within a dataset
    x: float  # Planar coordinate, arbitrary length unit
    y: float  # Same unit as x

    @field_validator("x", "y")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("site coordinates must be finite")
        return value


# Replicated observations of a spatial field: values[rep, site] or values[rep, site, variable].
# NaN marks a missing cell; estimators drop it pairwise and never impute it.
class SpatialDataset(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sites: Tuple[Site, ...]
    values: np.ndarray
    rep_ids: Tuple[str, ...]  # Original replication labels, in row order
    variable_names: Optional[Tuple[str, ...]] = None  # Set only for multi-variable data

    @field_validator("values", mode="before")
    @classmethod
    def _freeze_values(cls, values) -> np.ndarray:
        return _read_only(values)

    @model_validator(mode="after")
    def _check_shape(self) -> "SpatialDataset":
        ids = [site.id for site in self.sites]
        if len(set(ids)) != len(ids):
            raise ValueError("site ids must be unique within a dataset")
        if self.values.ndim not in (2, 3):
            raise ValueError("values must be a (reps x sites) or (reps x sites x variables) array")
        if self.values.shape[0] < 1:
            raise ValueError("a dataset needs at least one replication")
        if self.values.shape[1] != len(self.sites):
            raise ValueError("values has %d columns for %d sites" % (self.values.shape[1], len(self.sites)))
        if self.values.shape[0] != len(self.rep_ids):
            raise ValueError("rep_ids does not match the number of replications")
        if self.values.ndim == 3:
            if self.variable_names is None or len(self.variable_names) != self.values.shape[2]:
                raise ValueError("variable_names must name every variable of a multi-variable dataset")
        elif self.variable_names is not None:
            raise ValueError("variable_names given for a single-variable dataset")
        return self

    @property
    def n_reps(self) -> int:
        return self.values.shape[0]

    @property
    def n_sites(self) -> int:
        return self.values.shape[1]

    @property
    def n_vars(self) -> int:
        return 1 if self.values.ndim == 2 else self.values.shape[2]

    @property
    def site_ids(self) -> List[str]:
        return [site.id for site in self.sites]

    @property
    def coordinates(self) -> np.ndarray:
        return np.array([[site.x, site.y] for site in self.sites], dtype=float).reshape(-1, 2)

    def with_values(self, values: np.ndarray) -> "SpatialDataset":
        """Same sites and replications, new single-variable values."""
        return SpatialDataset(sites=self.sites, values=values, rep_ids=self.rep_ids)

    def variable(self, name: str) -> "SpatialDataset":
        """Single-variable view of one variable of a multi-variable dataset."""
        if self.variable_names is None:
            raise InputError("dataset has no variables to select from")
        if name not in self.variable_names:
            raise InputError(f"unknown variable '{name}'")
        return self.with_values(self.values[:, :, self.variable_names.index(name)])


# Site pairs grouped by separation distance into half-open bins [lo, hi)
class DistanceBins(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    edges: Tuple[float, ...]
    pairs_per_bin: Tuple[np.ndarray, ...]  # (m, 2) int arrays of (i, j), i < j, lexicographic
    distances_per_bin: Tuple[np.ndarray, ...]  # pair distances aligned with pairs_per_bin
    discarded: int = 0  # pairs outside [edges[0], edges[-1])

    @property
    def centers(self) -> List[float]:
        return [(lo + hi) / 2.0 for lo, hi in zip(self.edges[:-1], self.edges[1:])]

    @property
    def n_pairs(self) -> List[int]:
        return [len(pairs) for pairs in self.pairs_per_bin]


# GEV margin: location, scale and shape
class GevParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float  # Location
    sigma: float  # Scale, strictly positive
    xi: float  # Shape; xi = 0 is the Gumbel case
    clamped: bool = False  # True when a fit pushed xi into its allowed range

    @field_validator("sigma")
    @classmethod
    def _positive_scale(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("GEV scale must be > 0")
        return value


# Tagged bivariate copula: a parametric family or an empirical table of pseudo-observations
class CopulaModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: CopulaFamily
    param: Optional[float] = None
    table: Optional[np.ndarray] = None  # (n, 2) pseudo-observations, empirical family only

    @field_validator("table", mode="before")
    @classmethod
    def _freeze_table(cls, table):
        return None if table is None else _read_only(table)

    @model_validator(mode="after")
    def _check_domain(self) -> "CopulaModel":
        family, param = self.family, self.param
        if family in (CopulaFamily.gumbel, CopulaFamily.gaussian, CopulaFamily.clayton):
            if param is None or not math.isfinite(param):
                raise ValueError(f"{family.value} copula needs a finite parameter")
        if family == CopulaFamily.gumbel and param < 1:
            raise ValueError("gumbel copula needs alpha >= 1")
        if family == CopulaFamily.gaussian and not -1 < param < 1:
            raise ValueError("gaussian copula needs rho in (-1, 1)")
        if family == CopulaFamily.clayton and not param > 0:
            raise ValueError("clayton copula needs theta > 0")
        if family == CopulaFamily.empirical:
            table = self.table
            if table is None or table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 2:
                raise ValueError("empirical copula needs an (n >= 2, 2) table of pseudo-observations")
            if np.any(~((table > 0) & (table < 1))):
                raise ValueError("empirical copula pseudo-observations must lie in (0, 1)")
        return self

    @classmethod
    def empirical(cls, pairs) -> "CopulaModel":
        return cls(family=CopulaFamily.empirical, table=np.asarray(pairs, dtype=float))

    @property
    def label(self) -> str:
        names = {CopulaFamily.gumbel: "alpha", CopulaFamily.gaussian: "rho", CopulaFamily.clayton: "theta"}
        if self.family in names:
            return f"{self.family.value}:{names[self.family]}={self.param!r}"
        return self.family.value


# A scalar estimate with its diagnostics
class Estimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    clamped: bool = False  # True when value was pushed back into its admissible range
    spread: Optional[float] = None  # Probe spread / convergence diagnostic, when meaningful


# Distance-binned estimates, ready to plot
class DependenceCurve(BaseModel):
    model_config = ConfigDict(frozen=True)

    bin_centers: List[float]  # Distance units
    estimates: List[Optional[float]]  # None where a bin has no usable data
    n_pairs: List[int]
    kind: CurveKind
    clamped: List[bool] = Field(default_factory=list)

    @model_validator(mode="after")
    def _equal_lengths(self) -> "DependenceCurve":
        n = len(self.bin_centers)
        if len(self.estimates) != n or len(self.n_pairs) != n:
            raise ValueError("bin_centers, estimates and n_pairs must have equal lengths")
        if self.clamped and len(self.clamped) != n:
            raise ValueError("clamped flags must align with bins")
        return self

    def records(self) -> List[Dict]:
        flags = self.clamped or [False] * len(self.bin_centers)
        return [
            {"bin_center": c, "estimate": e, "n_pairs": n, "clamped": f, "stderr": None}
            for c, e, n, f in zip(self.bin_centers, self.estimates, self.n_pairs, flags)
        ]


# Ledford-Tawn fit of the structure variable tail
class TailDepFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta_hat: float  # Coefficient of tail dependence, in (0, 1]
    c_hat: float  # Scale of the survival model c * w^(-1/eta)
    u_h: float  # Threshold on the unit-Frechet scale
    n_exceed: int
    n_total: int
    mode: FitMode = FitMode.standard
    clamped: bool = False
    negative_terms: int = 0  # paper_literal Hill summands below zero (exceedances under 2 u_h)

    @model_validator(mode="after")
    def _check(self) -> "TailDepFit":
        if not 0 < self.eta_hat <= 1:
            raise ValueError("eta_hat must lie in (0, 1]")
        if self.n_exceed > self.n_total:
            raise ValueError("n_exceed cannot exceed n_total")
        return self

    @property
    def gamma_e(self) -> float:
        return 2.0 * (1.0 - self.eta_hat)


# The N_k block of a partition of the site index set
class Partition(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_k: Tuple[int, ...]

    @field_validator("n_k", mode="before")
    @classmethod
    def _sorted_unique(cls, n_k):
        indices = sorted(set(int(i) for i in n_k))
        if not indices:
            raise ValueError("N_k must not be empty")
        if indices[0] < 0:
            raise ValueError("site indices must be non-negative")
        return tuple(indices)

    @classmethod
    def from_site_ids(cls, dataset: SpatialDataset, ids: List[str]) -> "Partition":
        known = dataset.site_ids
        missing = [site_id for site_id in ids if site_id not in known]
        if missing:
            raise InputError(f"unknown site(s) in subset: {', '.join(missing)}")
        return cls(n_k=[known.index(site_id) for site_id in ids])

    def complement(self, n_sites: int) -> Tuple[int, ...]:
        if self.n_k[-1] >= n_sites:
            raise InputError(f"site index {self.n_k[-1]} out of range for {n_sites} sites")
        rest = tuple(i for i in range(n_sites) if i not in self.n_k)
        if not rest:
            raise InputError("N_k must be a proper subset of the sites")
        return rest


class DiscordanceResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float
    n_condition: int  # Replications satisfying the conditioning event
    n_joint: int  # ... that also satisfy the target event
    direction: Direction


# What to simulate; the seed is mandatory
class SimSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SimKind
    n_reps: int = Field(ge=1)
    seed: int
    range_r: Optional[float] = Field(default=None, gt=0)  # Correlogram range, gaussian field
    storm_sigma: Optional[float] = Field(default=None, gt=0)  # Storm scale, smith
    truncation_radius: Optional[float] = Field(default=None, gt=0)  # Window padding, smith
    alpha: Optional[float] = Field(default=None, ge=1)  # Logistic dependence

    @model_validator(mode="after")
    def _kind_params(self) -> "SimSpec":
        needed = {
            SimKind.gaussian_copula_field: "range_r",
            SimKind.smith_storm: "storm_sigma",
            SimKind.logistic_pairs: "alpha",
        }
        field = needed.get(self.kind)
        if field is not None and getattr(self, field) is None:
            raise ValueError(f"{self.kind.value} simulation needs {field}")
        return self


# Flag name shown to users for each RunConfig field
FLAG_NAMES = {
    "sites": "--sites",
    "obs": "--obs",
    "bins": "--bins",
    "q": "--q",
    "threshold_q": "--threshold-q",
    "copula": "--copula",
    "subset": "--subset",
    "kind": "--kind",
    "reps": "--reps",
    "seed": "--seed",
    "sigma": "--sigma",
    "range_r": "--range",
    "alpha": "--alpha",
}

REQUIRED_FLAGS = {
    Command.fit_margins: ("sites", "obs"),
    Command.transform: ("sites", "obs"),
    Command.madogram: ("sites", "obs", "bins"),
    Command.extremal_coeff: ("sites", "obs", "bins"),
    Command.extremogram: ("sites", "obs", "bins", "q"),
    Command.cross_extremogram: ("sites", "obs", "bins", "q"),
    Command.taildep: ("sites", "obs", "bins", "threshold_q"),
    Command.discordance: ("sites", "obs", "subset"),
    Command.simulate: ("sites", "kind", "reps", "seed"),
    Command.theta_copula: ("copula",),
}


# Everything one command invocation needs
class RunConfig(BaseModel):
    command: Command
    sites: Optional[Path] = None
    obs: Optional[Path] = None
    bins: Optional[List[float]] = None
    q: Optional[float] = None
    side: TailSide = TailSide.upper
    threshold_q: Optional[float] = None
    threshold_basis: ThresholdBasis = ThresholdBasis.marginal
    mode: FitMode = FitMode.standard
    margin: str = "gev"
    to: str = "frechet"
    copula: Optional[str] = None
    probes: Optional[List[float]] = None
    subset: Optional[List[str]] = None
    direction: Direction = Direction.upper
    thresholds: Optional[Path] = None
    median: bool = False
    kind: Optional[SimKind] = None
    sigma: Optional[float] = None
    range_r: Optional[float] = None
    alpha: Optional[float] = None
    truncation: Optional[float] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[Path] = None
    threads: int = 1
    progress: bool = False

    def check_required(self) -> None:
        """Raise InputError naming the first missing flag for this command."""
        for field in REQUIRED_FLAGS[self.command]:
            if getattr(self, field) is None:
                raise InputError(f"{self.command.value}: missing required flag {FLAG_NAMES[field]}")
        if self.command == Command.discordance and self.thresholds is None and not self.median:
            raise InputError("discordance: give either --thresholds or --median")
        if self.command == Command.simulate:
            kind_flag = {
                SimKind.smith_storm: "sigma",
                SimKind.gaussian_copula_field: "range_r",
                SimKind.logistic_pairs: "alpha",
            }.get(self.kind)
            if kind_flag is not None and getattr(self, kind_flag) is None:
                raise InputError(f"simulate: --kind {self.kind.value} needs {FLAG_NAMES[kind_flag]}")
