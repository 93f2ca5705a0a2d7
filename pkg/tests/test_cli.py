import json

import pytest

from cli.main import main


@pytest.fixture
def config_path(write_config, fig4_config_text):
    return write_config(fig4_config_text + "x = 0.1\n")


def test_threshold_command(tmp_path, config_path):
    out = tmp_path / "threshold.json"
    code = main(["threshold", "--config", str(config_path), "--out", str(out), "--format", "json"])
    assert code == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["report"] == "ThresholdReport"
    assert document["x_threshold"] == 1.0
    assert document["params_snapshot"]["command"] == "threshold"


def test_sweep_t2_writes_csv(tmp_path, config_path):
    out = tmp_path / "t2.csv"
    code = main(["sweep-t2", "--config", str(config_path), "--f", "1e6", "--grid", "51", "--out", str(out)])
    assert code == 0
    text = out.read_text(encoding="utf-8")
    assert "# command = sweep-t2" in text
    assert "# command_args.grid_points = 51" in text
    assert "above_threshold" in text


def test_identical_runs_give_identical_files(tmp_path, config_path):
    args = ["sweep-freq", "--config", str(config_path), "--fmin", "1e5", "--fmax", "8e6", "--n", "40"]
    assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_spectrum_to_stdout(capsys, config_path):
    assert main(["spectrum", "--config", str(config_path), "--f", "1e6"]) == 0
    assert "axis_value,s_plus,s_minus,s_plus_db,s_minus_db,status" in capsys.readouterr().out


def test_optimize_and_pump_sweep(tmp_path, config_path):
    out = tmp_path / "optimum.json"
    assert main(["optimize", "--config", str(config_path), "--f", "1e6", "--baseline", "same-loss",
                 "--out", str(out), "--format", "json"]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["baseline"] == "same-loss"
    assert main(["sweep-pump", "--config", str(config_path), "--f", "1e6", "--T2", "0.8", "--grid", "10",
                 "--out", str(tmp_path / "pump.csv")]) == 0


def test_validation_error_exit_code(config_path):
    assert main(["spectrum", "--config", str(config_path), "--f", "1e6", "--format", "csv"]) == 0
    assert main(["sweep-pump", "--config", str(config_path), "--f", "1e6", "--T2", "1.5"]) == 1


def test_missing_config_exit_code():
    assert main(["spectrum", "--f", "1e6"]) == 1
    assert main(["spectrum", "--config", "does-not-exist.cfg", "--f", "1e6"]) == 1


def test_usage_error_exit_code():
    assert main(["no-such-command"]) == 1


def test_threshold_error_exit_code(write_config, fig4_config_text):
    above = write_config(fig4_config_text + "x = 0.6\nT2 = 0.3\n", name="above.cfg")
    assert main(["spectrum", "--config", str(above), "--f", "1e6"]) == 2


def test_output_error_exit_code(tmp_path, config_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("file")
    assert main(["threshold", "--config", str(config_path), "--out", str(blocker / "x.csv")]) == 3


def test_flagged_points_do_not_fail_the_run(tmp_path, config_path):
    assert main(["sweep-t2", "--config", str(config_path), "--f", "1e6", "--out", str(tmp_path / "t2.csv")]) == 0


def test_reproduce_writes_one_file_per_output(tmp_path):
    out = tmp_path / "fig7b"
    assert main(["reproduce", "--preset", "fig7b", "--out", str(out), "--format", "json"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["fig7b.json", "fig7b_measured_points.json"]
    document = json.loads((out / "fig7b.json").read_text(encoding="utf-8"))
    assert document["stage"] == "detected"
    assert document["params_snapshot"]["command_args.preset"] == "fig7b"


def test_reproduce_unknown_preset():
    assert main(["reproduce", "--preset", "fig9"]) == 1


def test_non_finite_parameters_exit_as_validation_errors(tmp_path, write_config, fig4_config_text):
    long_loop = write_config(fig4_config_text.replace("la = ", "#la = ") + "la = inf\n", name="la.cfg")
    out = tmp_path / "freq.csv"
    assert main(["sweep-freq", "--config", str(long_loop), "--fmin", "1e5", "--fmax", "8e6", "--n", "10",
                 "--out", str(out)]) == 1
    assert not out.exists()
    long_cavity = write_config(fig4_config_text.replace("l = ", "#l = ") + "l = inf\n", name="l.cfg")
    assert main(["spectrum", "--config", str(long_cavity), "--f", "1e6"]) == 1
