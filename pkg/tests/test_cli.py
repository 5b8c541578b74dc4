import sys
from os import path
from unittest.mock import patch

from pytest import mark

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from run import EXIT_INVALID_CONFIG, EXIT_NUMERICAL, EXIT_OK, build_parser, load_config, main
from src.exceptions import NumericalException, ScenarioConfigException
from src.runner import ScenarioRunner


def test_flags_override_preset():
    args = build_parser().parse_args(["--preset", "binary-fig6a", "--rho", "2", "--payoffs", "1,2,3,4"])
    config = load_config(args)
    assert config.parameters == {"rho": 2.0, "payoffs": [1.0, 2.0, 3.0, 4.0]}
    assert config.sweep.series_parameter == "payoffs"


def test_sweep_flag_replaces_preset_sweep():
    args = build_parser().parse_args(["--preset", "health-fig4", "--sweep", "cost:0.1:0.4:3"])
    assert load_config(args).sweep.parameter == "cost"


def test_scenario_mismatch():
    args = build_parser().parse_args(["binary", "--preset", "voting-fig7"])
    try:
        load_config(args)
    except ScenarioConfigException as e:
        assert "does not match" in str(e)
        return

    assert False, "Expected ScenarioConfigException, but it was not raised"


@mark.asyncio
async def test_list_presets(capsys):
    assert await main(["--list-presets"]) == EXIT_OK
    assert "health-fig3\thealth\t" in capsys.readouterr().out


@mark.asyncio
async def test_run_to_stdout(capsys):
    assert await main(["voting", "--quiet"]) == EXIT_OK
    lines = capsys.readouterr().out.split("\r\n")
    assert lines[0] == "record,voter,beta,mu,threshold,belief,vote,value"
    assert lines[1].startswith("voter,1,0.25,0.5,")


@mark.asyncio
async def test_sweep_to_file(tmp_path):
    target = tmp_path / "sweep.csv"
    status = await main(["binary", "--sweep", "rho:0.1:1:3", "--out", str(target), "--quiet"])
    assert status == EXIT_OK
    with open(target, "r", encoding="utf-8", newline="") as file:
        lines = file.read().split("\r\n")
    assert lines[0] == "rho,mu_B,mu_W,alpha,favored,value_bayes,value_wishful"
    assert [line.split(",")[0] for line in lines[1:4]] == ["0.1", "0.55", "1"]
    assert lines[4] == ""


@mark.asyncio
async def test_invalid_config_exit_codes():
    for argv in (
        [],
        ["binary", "--rho", "-1"],
        ["--preset", "health-fig9"],
        ["finite", "--set", "mu0=[0.5,0.5]"],
        ["health", "--sweep", "rho:1:2"],
        ["investor", "--config", "missing.json"],
        ["investor", "--set", 'prior={"family": "piecewise_linear", "knots": [[-2], [1]]}'],
    ):
        assert await main(argv + ["--quiet"]) == EXIT_INVALID_CONFIG


@mark.asyncio
async def test_numerical_failure_exit_code():
    with patch.object(ScenarioRunner, "run_scenario", side_effect=NumericalException("no bracket")):
        assert await main(["binary", "--quiet"]) == EXIT_NUMERICAL
