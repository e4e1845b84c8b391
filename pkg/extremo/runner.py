"""Command orchestration: load inputs, run one pipeline, emit JSON Lines or CSV."""
import io
import logging
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional

import click
import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError

from extremo import config as config_defaults
from extremo import dataset as core
from extremo.errors import ExtremoError, InputError
from extremo.models import Command
from extremo.schemas import DistanceBins, Partition, RunConfig, SimSpec, SpatialDataset
from extremo.utils import dependence, discordance, extremogram, margins, sim, taildep
from extremo.utils.copulas import parse_copula

logger = logging.getLogger(__name__)


def _emit(data: bytes, out: Optional[Path]) -> None:
    if out is None:
        click.echo(data, nl=False)
    else:
        out.write_bytes(data)


def _emit_records(records: Iterable[Dict], out: Optional[Path]) -> None:
    # orjson writes NaN as null and floats in shortest round-trip form
    lines = [orjson.dumps(record, option=orjson.OPT_SERIALIZE_NUMPY) + b"\n" for record in records]
    _emit(b"".join(lines), out)


def _emit_csv(frame: pd.DataFrame, out: Optional[Path]) -> None:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    _emit(buffer.getvalue().encode("utf-8"), out)


def _load(config: RunConfig) -> SpatialDataset:
    return core.load_dataset(config.sites, config.obs)


def _bins(config: RunConfig, data: SpatialDataset) -> DistanceBins:
    bins = core.bin_pairs(data, config.bins)
    if bins.discarded:
        click.echo(f"{bins.discarded} site pair(s) outside the bin edges were discarded", err=True)
    return bins


def _fit_margins(config: RunConfig) -> None:
    fits = margins.fit_margins(_load(config))
    _emit_records(({"site_id": site_id, **fit.model_dump()} for site_id, fit in fits.items()), config.out)


def _transform(config: RunConfig) -> None:
    data = _load(config)
    frechet = margins.to_unit_frechet(data, margins.fit_margins(data))
    if config.to == "uniform":
        frechet = frechet.with_values(np.exp(-1.0 / frechet.values))
    elif config.to != "frechet":
        raise InputError(f"unknown target scale '{config.to}' (choose frechet or uniform)")
    _emit_csv(core.to_frame(frechet), config.out)


def _madogram(config: RunConfig) -> None:
    data = _load(config)
    curve = dependence.empirical_madogram(data, _bins(config, data), config.threads)
    _emit_records(curve.records(), config.out)


def _extremal_coeff(config: RunConfig) -> None:
    data = _load(config)
    curve = dependence.extremal_coefficient_curve(data, _bins(config, data), config.margin, config.threads)
    _emit_records(curve.records(), config.out)


def _extremogram(config: RunConfig) -> None:
    data = _load(config)
    curve = extremogram.empirical_extremogram(data, _bins(config, data), config.q, config.side, config.threads)
    _emit_records(curve.records(), config.out)


def _cross_extremogram(config: RunConfig) -> None:
    data = _load(config)
    matrix = extremogram.extremogram_matrix(data, _bins(config, data), config.q, config.threads)
    records: List[Dict] = []
    for component, curve in matrix._asdict().items():
        records.extend({"component": component, **record} for record in curve.records())
    _emit_records(records, config.out)


def _to_frechet(config: RunConfig, data: SpatialDataset) -> SpatialDataset:
    if config.margin == "rank":
        return margins.rank_to_unit_frechet(data)
    if config.margin == "gev":
        return margins.to_unit_frechet(data, margins.fit_margins(data))
    if config.margin == "frechet":
        return data
    raise InputError(f"unknown margin '{config.margin}' for taildep (choose rank, gev or frechet)")


def _taildep(config: RunConfig) -> None:
    data = _load(config)
    bins = _bins(config, data)
    fits = taildep.taildep_curve(
        _to_frechet(config, data), bins, config.threshold_q, config.mode, config.threshold_basis, config.threads
    )
    records = []
    for center, fit in zip(bins.centers, fits):
        if fit is None:
            empty = dict.fromkeys(("eta_hat", "c_hat", "gamma_e"))
            flags = {"n_exceed": 0, "clamped": False, "negative_terms": 0, "mode": config.mode.value}
            records.append({"bin_center": center, **empty, **flags})
            continue
        records.append(
            {
                "bin_center": center,
                "eta_hat": fit.eta_hat,
                "c_hat": fit.c_hat,
                "gamma_e": fit.gamma_e,
                "n_exceed": fit.n_exceed,
                "clamped": fit.clamped,
                "negative_terms": fit.negative_terms,
                "mode": fit.mode.value,
            }
        )
    _emit_records(records, config.out)


def _read_thresholds(path: Path, data: SpatialDataset) -> np.ndarray:
    try:
        frame = pd.read_csv(path, dtype={"site_id": str}, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputError(f"cannot read thresholds table {path}: {exc}") from exc
    if not {"site_id", "threshold"} <= set(frame.columns):
        raise InputError("thresholds table needs columns site_id, threshold")
    given = dict(zip(frame["site_id"].astype(str), pd.to_numeric(frame["threshold"], errors="coerce")))
    missing = [site_id for site_id in data.site_ids if site_id not in given]
    if missing:
        raise InputError(f"no threshold for site(s): {', '.join(missing)}")
    x = np.array([given[site_id] for site_id in data.site_ids], dtype=float)
    if not np.all(np.isfinite(x)):
        raise InputError("thresholds must be finite numbers")
    return x


def _discordance(config: RunConfig) -> None:
    data = _load(config)
    part = Partition.from_site_ids(data, config.subset)
    if config.median:
        result = discordance.median_discordance(data, part, config.direction)
    else:
        result = discordance.discordance_degree(data, part, _read_thresholds(config.thresholds, data), config.direction)
    record = {"subset": [data.site_ids[i] for i in part.n_k], **result.model_dump(mode="json")}
    _emit_records([record], config.out)


def _simulate(config: RunConfig) -> None:
    spec = SimSpec(
        kind=config.kind,
        n_reps=config.reps,
        seed=config.seed,
        range_r=config.range_r,
        storm_sigma=config.sigma,
        truncation_radius=config.truncation,
        alpha=config.alpha,
    )
    field = sim.simulate(spec, core.load_sites(config.sites), config.threads, config.progress)
    _emit_csv(core.to_frame(field), config.out)


def _theta_copula(config: RunConfig) -> None:
    model = parse_copula(config.copula)
    probes = config.probes or config_defaults.THETA_PROBES
    estimate = dependence.theta_from_copula(model, probes)
    _emit_records(
        [{"copula": model.label, "theta": estimate.value, "spread": estimate.spread, "chi": 2.0 - estimate.value}],
        config.out,
    )


HANDLERS: Dict[Command, Callable[[RunConfig], None]] = {
    Command.fit_margins: _fit_margins,
    Command.transform: _transform,
    Command.madogram: _madogram,
    Command.extremal_coeff: _extremal_coeff,
    Command.extremogram: _extremogram,
    Command.cross_extremogram: _cross_extremogram,
    Command.taildep: _taildep,
    Command.discordance: _discordance,
    Command.simulate: _simulate,
    Command.theta_copula: _theta_copula,
}


def describe_validation(exc: ValidationError) -> str:
    """First validation failure as one line."""
    first = exc.errors()[0]
    where = ".".join(str(part) for part in first["loc"])
    return f"{where}: {first['msg']}" if where else first["msg"]


def run(config: RunConfig) -> int:
    """
    Execute one command and return its exit status.

    0 on success, 2 for input/validation failures, 3 for numerical failures inside an estimator.
    Failures print one `error: <detail>` line on stderr.
    """
    try:
        config.check_required()
        HANDLERS[config.command](config)
    except ExtremoError as exc:
        click.echo(f"error: {exc.detail}", err=True)
        return exc.exit_code
    except ValidationError as exc:
        click.echo(f"error: {describe_validation(exc)}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    logger.info("%s finished", config.command.value)
    return 0
