import json
import subprocess
import sys

import numpy as np
import pytest

from mmrac.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from mmrac.scenarios import builtin, config, read_csv, to_dict


def test_list_builtins(capsys):
    assert main(["list-builtins"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("simulation1", "example1", "experiment1", "experiment2"):
        assert name in out


def test_simulate_builtin(tmp_path):
    rc = main(["simulate", "--builtin", "example1", "--out", str(tmp_path),
               "--t-end", "1.0", "--step", "0.002", "--gnuplot"])
    assert rc == EXIT_OK
    cols, data = read_csv(tmp_path / "example1.csv")
    assert data.shape[0] == 51 and data[-1, 0] == pytest.approx(1.0)
    assert (tmp_path / "example1.gp").exists()
    metrics = (tmp_path / "example1_metrics.txt").read_text()
    assert "parameter_convergence_time = " in metrics
    saved = json.loads((tmp_path / "example1_config.json").read_text())
    assert saved["t_end"] == 1.0 and saved["step"] == 0.002


def test_simulate_scenario_file_with_seed(tmp_path):
    data = to_dict(builtin("example1").replace(t_end=0.5, name="noisy"))
    data["noise"] = {"kind": "gaussian", "std_dev": 0.05, "seed": 1}
    path = tmp_path / "noisy.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    runs = []
    for seed in ("5", "5", "6"):
        out = tmp_path / f"out{len(runs)}"
        assert main(["simulate", "--scenario", str(path), "--out", str(out),
                     "--seed", seed]) == EXIT_OK
        runs.append(read_csv(out / "noisy.csv")[1])
        assert json.loads((out / "noisy_config.json").read_text())["noise"]["seed"] == int(seed)
    assert np.array_equal(runs[0], runs[1])
    assert not np.array_equal(runs[0], runs[2])


def test_compare(tmp_path):
    path = tmp_path / "short.json"
    config.dump(builtin("example1").replace(t_end=2.0, name="short"), path)
    assert main(["compare", "--scenario", str(path), "--out", str(tmp_path)]) == EXIT_OK
    report = (tmp_path / "short_compare.txt").read_text()
    assert "identical_input = True" in report
    assert "indirect_first_level.parameter_convergence_time" in report
    assert (tmp_path / "short-first-level.csv").exists()
    assert (tmp_path / "short-second-level.csv").exists()


def test_unknown_builtin_exit_code(tmp_path, capsys):
    assert main(["simulate", "--builtin", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "unknown built-in" in capsys.readouterr().err


def test_invalid_config_exit_code(tmp_path):
    data = to_dict(builtin("example1"))
    data["reference"]["theta_m"] = [2.0, 1.0]   # not Hurwitz
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    assert main(["simulate", "--scenario", str(path), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["simulate", "--builtin", "example1", "--out", str(tmp_path),
                 "--step", "-1"]) == EXIT_CONFIG


def test_numerical_failure_exit_code(tmp_path, capsys):
    # a violently unstable plant left open loop until t_star overflows
    data = to_dict(builtin("simulation1"))
    data["plant"]["profile"]["base"] = [400.0, 400.0]
    data["vertices"] = {"lower": [0, 0], "upper": [500, 500], "margin": 0.1}
    data["controller"] = {"kind": "second_level_algebraic", "t_star": 9.0}
    path = tmp_path / "boom.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with np.errstate(all="ignore"):
        rc = main(["simulate", "--scenario", str(path), "--out", str(tmp_path)])
    assert rc == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mmrac", "list-builtins"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "example1" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "mmrac", "simulate", "--builtin", "x",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 2
