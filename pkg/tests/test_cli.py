import json
import subprocess
import sys

import pytest

from scatter1d.cli import EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_VERIFY, main

SMALL = ["--grid", "-20,20,1024", "--kgrid", "0.1,4,16"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    cols = lines[0].split(",")
    return [dict(zip(cols, map(float, l.split(",")))) for l in lines[1:]]


def test_scatter_zero_potential(capsys):
    code, out, _ = run(capsys, "scatter", "--potential", "zero", "--kgrid", "0.5,3,6")
    assert code == EXIT_OK
    assert out.startswith("# scatter1d scatter schema=1")
    for row in _csv(out):
        assert abs(row["re_t"] - 1) < 1e-10 and abs(row["im_t"]) < 1e-10
        assert abs(row["re_r_plus"]) < 1e-10


def test_spectrum_attractive_delta(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "dirac:-1", *SMALL)
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data["bound_states"]) == 1
    assert abs(data["bound_states"][0]["lambda"] + 1) < 1e-6


def test_spectrum_oracle(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "poschl_teller:6", "--oracle", *SMALL)
    assert code == EXIT_OK
    assert "oracle" in json.loads(out)


def test_transform_reproducible(capsys, tmp_path):
    args = ["transform", "--potential", "gaussian_bump:-1,1,0", "--state", "gaussian:-1,1,1", *SMALL]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    assert "# parseval" in out1


def test_out_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "scatter", "--potential", "dirac:1", "--kgrid", "1,2,2", "--out", str(tmp_path))
    assert code == EXIT_OK and out == ""
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and files[0].read_text().startswith("# scatter1d scatter")


def test_evolve_with_oracle(capsys):
    argv = ["evolve", "--potential", "poschl_teller:6", "--state", "gaussian:-3,1,1", "--oracle",
            "--grid", "-30,30,2048", "--kgrid", "0.05,6,256"]
    code, out, _ = run(capsys, *argv, "--times", "0.5")
    rows = _csv(out)
    assert code == EXIT_OK and len(rows) == 1 and rows[0]["oracle_error"] <= 1e-3
    # on this coarse grid the t = 1 comparison misses the 1e-3 bound and is reported as a failure
    code, out, _ = run(capsys, *argv, "--times", "0.5,1")
    assert code == EXIT_VERIFY and len(_csv(out)) == 2


def test_config_overrides_flags(capsys, tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("potential: zero\nkgrid: [0.5, 1.5, 3]\n")
    code, out, _ = run(capsys, "scatter", "--potential", "dirac:1", "--config", str(cfg))
    assert code == EXIT_OK
    assert "potential=zero" in out.splitlines()[0]
    assert len(_csv(out)) == 3


def test_yaml_unsigned_exponents(capsys, tmp_path):
    # YAML 1.1 loads 1.0e8 as a string
    cfg = tmp_path / "run.yaml"
    cfg.write_text("potential: zero\nkgrid: [0.5, 1.5, 3]\ntolerances: {condition: 1.0e8, guard: 1.0e-4}\n")
    code, _, err = run(capsys, "scatter", "--config", str(cfg))
    assert code == EXIT_OK, err


@pytest.mark.parametrize("text,needle", [
    ('{"potential": "zero",\n "grid": [1, 2}', "line 2"),
    ('{"colour": 1}', "unknown field"),
    ('{"tolerances": {"solver": -1}}', "tolerances.solver"),
    ('{"tolerances": {"tail": "small"}}', "tolerances.tail"),
])
def test_malformed_config(capsys, tmp_path, text, needle):
    cfg = tmp_path / "bad.json"
    cfg.write_text(text)
    code, _, err = run(capsys, "scatter", "--config", str(cfg))
    assert code == EXIT_USAGE
    assert needle in err


@pytest.mark.parametrize("argv", [
    ["scatter", "--potential", "nosuch"],
    ["scatter", "--grid", "1,0,10"],
    ["scatter", "--kgrid", "0,1,10"],
    ["transform", "--state", "square:1,2,3"],
    ["verify", "--only", "13"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err.startswith("scatter1d: usage error")


def test_solver_failure(capsys):
    code, _, err = run(capsys, "transform", "--potential", "poschl_teller:6", "--tol", "1e-30", *SMALL)
    assert code == EXIT_SOLVER
    assert "solver failure" in err


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "2,3")
    assert code == EXIT_OK
    assert "2/2 criteria passed" in out


def test_verify_failure_exit_code(capsys, tmp_path):
    # the unitarity criterion does not hold at the stated absolute tolerance
    code, out, _ = run(capsys, "verify", "--only", "4", "--out", str(tmp_path))
    assert code == EXIT_VERIFY
    assert "[FAIL]" in out
    assert json.loads((tmp_path / "verify.json").read_text())


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "scatter1d", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("scatter1d")
