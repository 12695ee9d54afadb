import json

import pytest

from nsgalab.cli import main


def test_bounds_outputs_formulas(capsys):
    assert main(["bounds", "--n", "601", "--pop-size", "76", "--ref-points", "76"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {
        "n": 601,
        "N": 76,
        "N_r": 76,
        "mei_opt": 9,
        "mei_upper": 18,
        "runtime_exponent": 10,
    }


def test_run_writes_csv(tmp_path, capsys):
    code = main(
        [
            "run", "--benchmark", "oneminmax", "--n", "20", "--pop-size", "6",
            "--ref-points", "6", "--seed", "3", "--windows", "1:10",
            "--out", str(tmp_path),
        ]
    )
    assert code == 0
    info = json.loads(capsys.readouterr().out)
    assert (tmp_path / "runs" / info["label"] / "3.csv").exists()
    assert info["t_start"] is not None


def test_validate_pass(capsys):
    assert main(["validate", "--lemma", "4", "--trials", "60", "--seed", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True


def test_validate_fail_exit_code(tmp_path, capsys):
    # two trials cannot land within +-0.01 of the 7/9 target
    out = tmp_path / "report.json"
    code = main(["validate", "--lemma", "9", "--trials", "2", "--out", str(out)])
    assert code == 2
    assert out.exists()
    assert json.loads(out.read_text())["passed"] is False


def test_invalid_configuration_exit_code(capsys):
    code = main(
        ["run", "--n", "20", "--pop-size", "1", "--ref-points", "4", "--out", "/tmp/x"]
    )
    assert code == 1
    assert "invalid configuration" in capsys.readouterr().err


def test_experiment_custom(tmp_path, capsys):
    code = main(
        [
            "experiment", "--table", "custom", "--benchmark", "oneminmax",
            "--n", "24", "--pop-size", "6", "--ref-points", "3", "--ref-points", "6",
            "--runs", "2", "--master-seed", "9", "--out", str(tmp_path / "exp"),
        ]
    )
    assert code == 0
    summary = json.loads((tmp_path / "exp" / "summary.json").read_text())
    assert len(summary["groups"][0]["configs"]) == 2
    assert (tmp_path / "exp" / "config.json").exists()


def test_experiment_requires_table(capsys):
    with pytest.raises(SystemExit):
        main(["experiment"])
