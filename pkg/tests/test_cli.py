import math

import numpy as np
import orjson
import pandas as pd
import pytest
from click.testing import CliRunner

from extremo.main import cli


@pytest.fixture
def runner():
    return CliRunner()


def jsonl(text):
    return [orjson.loads(line) for line in text.splitlines() if line.startswith("{")]


@pytest.fixture
def comonotone_tables(make_dataset, write_tables):
    column = np.random.default_rng(6).gumbel(size=(60, 1)) + 10
    return write_tables(make_dataset(np.hstack([column] * 4)))


@pytest.fixture
def random_tables(make_dataset, write_tables):
    return write_tables(make_dataset(np.random.default_rng(7).gumbel(size=(400, 3)) + 5))


def test_help_lists_flags(runner):
    result = runner.invoke(cli, ["taildep", "--help"])
    assert result.exit_code == 0
    for flag in ("--bins", "--threshold-q", "--mode", "--threads"):
        assert flag in result.output


def test_theta_copula(runner):
    result = runner.invoke(cli, ["theta-copula", "--copula", "gumbel:alpha=2.0"])
    assert result.exit_code == 0
    [record] = jsonl(result.output)
    assert record["theta"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert record["chi"] == pytest.approx(2 - math.sqrt(2), abs=1e-9)


def test_missing_bins_is_usage_error(runner, random_tables):
    sites, obs = random_tables
    result = runner.invoke(cli, ["madogram", "--sites", str(sites), "--obs", str(obs)])
    assert result.exit_code == 2
    assert "--bins" in result.output


def test_extremal_coeff_comonotone(runner, comonotone_tables):
    sites, obs = comonotone_tables
    result = runner.invoke(cli, ["extremal-coeff", "--sites", str(sites), "--obs", str(obs), "--bins", "0,1.5,3.5"])
    assert result.exit_code == 0
    records = jsonl(result.output)
    assert [r["estimate"] for r in records] == pytest.approx([1.0, 1.0])
    assert [r["n_pairs"] for r in records] == [3, 3]


def test_fit_margins_one_record_per_site(runner, random_tables):
    sites, obs = random_tables
    result = runner.invoke(cli, ["fit-margins", "--sites", str(sites), "--obs", str(obs)])
    assert result.exit_code == 0
    records = jsonl(result.output)
    assert [r["site_id"] for r in records] == ["s0", "s1", "s2"]
    assert all(r["sigma"] > 0 for r in records)


def test_taildep_runs(runner, random_tables):
    sites, obs = random_tables
    args = ["taildep", "--sites", str(sites), "--obs", str(obs), "--bins", "0,1.5,2.5", "--threshold-q", "0.5"]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    records = jsonl(result.output)
    assert len(records) == 2
    assert all(0 < r["eta_hat"] <= 1 for r in records)
    assert all(r["gamma_e"] == pytest.approx(2 * (1 - r["eta_hat"])) for r in records)


def test_discordance_median(runner, random_tables):
    sites, obs = random_tables
    result = runner.invoke(cli, ["discordance", "--sites", str(sites), "--obs", str(obs), "--subset", "s0", "--median"])
    assert result.exit_code == 0
    [record] = jsonl(result.output)
    assert record["subset"] == ["s0"]
    assert 0 <= record["delta"] <= 1


def test_discordance_empty_conditioning_event(runner, random_tables, tmp_path):
    sites, obs = random_tables
    thresholds = tmp_path / "thresholds.csv"
    pd.DataFrame({"site_id": ["s0", "s1", "s2"], "threshold": [100.0] * 3}).to_csv(thresholds, index=False)
    args = ["discordance", "--sites", str(sites), "--obs", str(obs), "--subset", "s0"]
    result = runner.invoke(cli, args + ["--direction", "lower", "--thresholds", str(thresholds)])
    assert result.exit_code == 3
    assert "conditioning event never observed" in result.output


def test_unknown_site_is_input_error(runner, tmp_path, sites_frame):
    sites, obs = tmp_path / "sites.csv", tmp_path / "obs.csv"
    sites_frame.to_csv(sites, index=False)
    pd.DataFrame({"rep_id": ["1", "1"], "site_id": ["A", "Z"], "value": [1.0, 2.0]}).to_csv(obs, index=False)
    result = runner.invoke(cli, ["fit-margins", "--sites", str(sites), "--obs", str(obs)])
    assert result.exit_code == 2
    assert "error: unknown site id(s) in observations: Z" in result.output


def test_simulate_output_independent_of_threads(runner, tmp_path, sites_frame):
    sites = tmp_path / "sites.csv"
    sites_frame.to_csv(sites, index=False)
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / f"sim{threads}.csv"
        args = ["simulate", "--sites", str(sites), "--kind", "smith", "--sigma", "1", "--reps", "3000", "--seed", "7"]
        result = runner.invoke(cli, args + ["--threads", threads, "--out", str(out)])
        assert result.exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    frame = pd.read_csv(tmp_path / "sim1.csv")
    assert list(frame.columns) == ["rep_id", "site_id", "value"]
    assert len(frame) == 6000


def test_simulate_needs_kind_parameter(runner, tmp_path, sites_frame):
    sites = tmp_path / "sites.csv"
    sites_frame.to_csv(sites, index=False)
    result = runner.invoke(cli, ["simulate", "--sites", str(sites), "--kind", "gaussian", "--reps", "10", "--seed", "1"])
    assert result.exit_code == 2
    assert "--range" in result.output


@pytest.fixture
def two_variable_tables(make_dataset, write_tables):
    return write_tables(make_dataset(np.random.default_rng(8).gumbel(size=(400, 3, 2)) + 5))


CURVE_COMMANDS = [
    ["madogram", "--bins", "0,1.5,2.5"],
    ["extremal-coeff", "--bins", "0,1.5,2.5", "--margin", "gev"],
    ["extremogram", "--bins", "0,1.5,2.5", "--q", "0.9"],
    ["taildep", "--bins", "0,1.5,2.5", "--threshold-q", "0.5"],
]


def run_with_threads(runner, args, out):
    result = runner.invoke(cli, args + ["--out", str(out)])
    assert result.exit_code == 0, result.output
    return out.read_bytes()


@pytest.mark.parametrize("command", CURVE_COMMANDS, ids=lambda args: args[0])
def test_curve_output_independent_of_threads(runner, random_tables, tmp_path, command):
    sites, obs = random_tables
    args = command[:1] + ["--sites", str(sites), "--obs", str(obs)] + command[1:]
    one = run_with_threads(runner, args + ["--threads", "1"], tmp_path / "one.jsonl")
    four = run_with_threads(runner, args + ["--threads", "4"], tmp_path / "four.jsonl")
    assert one == four
    assert len(jsonl(one.decode())) == 2


def test_cross_extremogram_output_independent_of_threads(runner, two_variable_tables, tmp_path):
    sites, obs = two_variable_tables
    args = ["cross-extremogram", "--sites", str(sites), "--obs", str(obs), "--bins", "0,1.5,2.5", "--q", "0.9"]
    one = run_with_threads(runner, args + ["--threads", "1"], tmp_path / "one.jsonl")
    four = run_with_threads(runner, args + ["--threads", "4"], tmp_path / "four.jsonl")
    assert one == four
    components = [record["component"] for record in jsonl(one.decode())]
    assert sorted(set(components)) == ["rho11", "rho12", "rho21", "rho22"]


def test_transform_output_is_repeatable(runner, random_tables, tmp_path):
    sites, obs = random_tables
    args = ["transform", "--sites", str(sites), "--obs", str(obs), "--to", "frechet"]
    first = run_with_threads(runner, args, tmp_path / "first.csv")
    second = run_with_threads(runner, args, tmp_path / "second.csv")
    assert first == second
    frame = pd.read_csv(tmp_path / "first.csv")
    assert list(frame.columns) == ["rep_id", "site_id", "value"]
    assert len(frame) == 1200
    assert (frame["value"] > 0).all()


def test_bad_thread_count_from_environment_is_usage_error(runner, random_tables):
    sites, obs = random_tables
    args = ["madogram", "--sites", str(sites), "--obs", str(obs), "--bins", "0,1.5,2.5"]
    result = runner.invoke(cli, args, env={"EXTREMO_THREADS": "many"})
    assert result.exit_code == 2
    assert "--threads" in result.output


def test_bad_log_level_is_usage_error(runner, monkeypatch):
    monkeypatch.setattr("extremo.config.LOG_LEVEL", "chatty")
    result = runner.invoke(cli, ["theta-copula", "--copula", "independence"])
    assert result.exit_code == 2
    assert "EXTREMO_LOG_LEVEL" in result.output
