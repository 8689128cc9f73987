import json

import pytest

from hardybounds.cli import main
from hardybounds.pointsets import load_sample


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "s.json"
    assert main(["gen-set", "--family", "spiral", "--count", "5", "--out", str(path)]) == 0
    return path


def test_gen_set(sample_file):
    s = load_sample(sample_file)
    assert len(s) == 5 and s.family == "spiral"


def test_gen_set_params(tmp_path, capsys):
    assert main(["gen-set", "--family", "radial_power", "--count", "3",
                 "--param", "beta=2", "--param", "angle=0"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [p[0] for p in data["points"]] == pytest.approx([3 / 4, 8 / 9, 15 / 16])


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["gen-set", "--family", "spiral"],
    ["gen-set", "--family", "nope", "--count", "3"],
    ["gen-set", "--family", "spiral", "--count", "3", "--param", "beta"],
    ["verify-sandwich", "--epsilon-grid", "1:2"],
    ["search-g", "--epsilon", "0.1"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_invalid_parameter_exit_1(capsys):
    assert main(["gen-set", "--family", "radial_power", "--count", "3", "--param", "beta=-1"]) == 1


def test_search_g(sample_file, tmp_path):
    out = tmp_path / "g.json"
    assert main(["search-g", "--sample", str(sample_file), "--epsilon", "0.1",
                 "--R", "0.5", "--brute", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert {"value", "kind", "certificate_zeros", "argmax_point", "residuals"} <= set(data)
    assert data["value"] == pytest.approx(data["oracle"]["value"], abs=1e-9)


def test_problem_file(sample_file, tmp_path, capsys):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"sample_path": str(sample_file), "epsilon": 0.1, "R": 0.5,
                                "p": 2, "mode": "plain"}))
    assert main(["search-g", "--problem", str(prob)]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "lower_certified"
    prob.write_text(json.dumps({"sample_path": str(sample_file)}))
    assert main(["search-g", "--problem", str(prob)]) == 1


def test_solve_dp(sample_file, tmp_path):
    out = tmp_path / "d.json"
    assert main(["solve-dp", "--sample", str(sample_file), "--epsilon", "1",
                 "--R", "0.6", "--nodes", "16", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["value"] == pytest.approx(1.25, abs=1e-6)


def test_missing_file(tmp_path):
    assert main(["search-g", "--sample", str(tmp_path / "none.json"), "--epsilon", "0.1"]) == 1


def test_sandwich_and_fit(sample_file, tmp_path, capsys):
    rep, csv = tmp_path / "r.json", tmp_path / "r.csv"
    argv = ["verify-sandwich", "--sample", str(sample_file), "--epsilon-grid", "0.4:0.5:4",
            "--budget", "30", "--nodes", "16", "--out", str(rep), "--csv", str(csv)]
    assert main(argv) == 0
    assert main(["verify-sandwich", "--report", str(rep)]) == 0
    assert csv.read_text().startswith("epsilon,g_value,g_kind,d2_value,ratio_log")
    capsys.readouterr()
    assert main(["fit-scaling", "--report", str(rep)]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert {"alpha_hat", "intercept", "r_squared"} <= set(fit)

    data = json.loads(rep.read_text())
    data["rows"][0]["g_value"] = data["rows"][0]["d2_value"] * 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["verify-sandwich", "--report", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "failed verification" in err and "g_certificate" in err


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "hardybounds", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify-sandwich" in proc.stdout
