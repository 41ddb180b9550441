import json

import pytest

from malmip.cli import main, read_config


def test_list_problems(capsys):
    assert main(["list-problems"]) == 0
    out = capsys.readouterr().out
    assert "lp2" in out and "rosenbrock-eq" in out


def test_solve_writes_report_and_trace(tmp_path):
    report = tmp_path / "r.json"
    trace = tmp_path / "t.jsonl"
    rc = main(["solve", "--problem", "cvxqp", "--report", str(report), "--trace", str(trace), "--quiet"])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert doc["status"] == "converged"
    records = [json.loads(line) for line in trace.read_text().splitlines()]
    inner = [r for r in records if r["event"] == "inner_step"]
    for key in ("event", "level", "outermost_iter", "outer_iter", "F_norm", "M", "alpha", "rho_tilde",
                "tau", "lam_norm", "c_norm_new"):
        assert key in inner[0]
    # full round-trip precision
    assert float(repr(doc["f_value"])) == doc["f_value"]


def test_check_derivatives_exit_zero(capsys):
    assert main(["check-derivatives", "--problem", "rosenbrock-eq"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["solve", "--problem", "nosuch"],
    ["solve"],
    ["frobnicate"],
    ["solve", "--problem", "cvxqp", "--set", "nosuch=1"],
    ["solve", "--problem", "cvxqp", "--set", "tol"],
    ["solve", "--problem", "cvxqp", "--set", "omega=1"],
    ["solve", "--problem", "lp2", "--x0", "0.5,abc"],
    ["solve", "--problem", "lp2", "--x0", "0.5,0.05"],
    ["solve", "--problem", "rosenbrock-eq", "--lp-mode"],
    ["check-derivatives", "--problem", "nosuch"],
    ["solve", "--problem", "cvxqp", "--config", "/nonexistent/file"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2


def test_nonconverged_exit_one():
    assert main(["solve", "--problem", "rosenbrock-eq", "--set", "max_inner=1", "--quiet"]) == 1


def test_config_then_set(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# loose run\ntol = 1e-6\nmax_outermost=0\n\n")
    assert read_config(str(cfg)) == {"tol": "1e-6", "max_outermost": "0"}
    report = tmp_path / "r.json"
    # the config caps the outermost loop; --set lifts the cap again
    assert main(["solve", "--problem", "cubic1d", "--config", str(cfg), "--quiet"]) == 1
    rc = main(["solve", "--problem", "cubic1d", "--config", str(cfg), "--set", "max_outermost=100",
               "--report", str(report), "--quiet"])
    assert rc == 0


def test_lp_mode_flag(tmp_path):
    report = tmp_path / "r.json"
    assert main(["solve", "--problem", "randlp", "--lp-mode", "--report", str(report), "--quiet"]) == 0
    doc = json.loads(report.read_text())
    assert doc["lp_mode"] is True and doc["counters"]["inner_steps"] == 0


def test_module_entry_point():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "malmip", "list-problems"], capture_output=True, text=True)
    assert out.returncode == 0 and "cvxqp" in out.stdout
