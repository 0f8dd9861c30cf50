import json
import subprocess
import sys

import numpy as np
import pytest

from srdensity import io
from srdensity.cli import QQ_PROBS, main
from srdensity.model import evaluate_density
from srdensity.partition import Partition

FAST = ["--iterations", "6000", "--burn-in", "2000", "--thin", "2"]


@pytest.fixture
def beta_data(tmp_path):
    path = tmp_path / "beta.csv"
    assert main(["gen-data", "--generator", "beta42", "--n", "300", "--seed", "1", "--output", str(path)]) == 0
    return path


def test_gen_data_deterministic(tmp_path, beta_data):
    other = tmp_path / "again.csv"
    main(["gen-data", "--generator", "beta42", "--n", "300", "--seed", "1", "--output", str(other)])
    assert beta_data.read_text() == other.read_text()
    xs = io.read_data_csv(beta_data)
    assert xs.size == 300
    # 17 significant digits round-trip exactly
    assert np.array_equal(np.loadtxt(beta_data), xs)


def test_fit_summary(tmp_path, beta_data):
    out, draws, curve = tmp_path / "fit.json", tmp_path / "draws.csv", tmp_path / "curve.csv"
    code = main(["fit", "--input", str(beta_data), "--output", str(out), "--k", "6", "--rho", "0.8",
                 "--draws-csv", str(draws), "--curve-csv", str(curve), "--reference", "beta42", *FAST])
    assert code == 0
    s = io.read_json(out)
    for key in ("partition", "m_star", "h_hat", "epsilon", "gamma", "acceptance_rate", "seed",
                "jitter_applied"):
        assert key in s
    p = Partition(tuple(s["partition"]["knots"]))
    h = np.array(s["h_hat"])
    assert abs(p.widths @ h - 1) < 1e-10
    # re-evaluating at the left knot of each cell gives back h_hat exactly
    assert evaluate_density(p, h, p.knot_array[:-1]).tolist() == s["h_hat"]
    d = io.read_draws_csv(draws)
    assert d.shape == (s["n_draws"], 6)
    assert np.allclose(d.mean(axis=0), h, rtol=0, atol=1e-12)
    header = curve.read_text().splitlines()[0]
    assert header == "x,h_hat,band_lower,band_upper,reference"
    assert len(curve.read_text().splitlines()) == 513


def test_fit_is_deterministic(tmp_path, beta_data):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        main(["fit", "--input", str(beta_data), "--output", str(out), "--k", "4", "--rho", "1", *FAST])
    assert a.read_text() == b.read_text()


def test_fit_empty_data_keeps_prior(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "fit.json"
    assert main(["fit", "--input", str(empty), "--output", str(out), "--k", "5", *FAST]) == 0
    s = io.read_json(out)
    assert s["m_star"] == s["m"] and s["n"] == 0


def test_fit_with_eb(tmp_path, beta_data):
    out = tmp_path / "fit.json"
    code = main(["fit", "--input", str(beta_data), "--output", str(out), "--k", "eb", "--rho", "eb",
                 "--eb-k-values", "3,5", "--eb-rho-values", "0.5,2", "--eb-mc-draws", "100",
                 "--eb-rungs", "4", "--eb-burn-in", "500", *FAST])
    assert code == 0
    s = io.read_json(out)
    assert s["k"] == s["eb"]["k_hat"] and s["rho"] == s["eb"]["rho_hat"]


def test_eb_single_point(tmp_path, beta_data):
    out = tmp_path / "eb.json"
    assert main(["eb", "--input", str(beta_data), "--output", str(out), "--k-values", "7",
                 "--rho-values", "1.5", "--mc-draws", "100", "--rungs", "3"]) == 0
    r = json.loads(out.read_text())
    assert (r["k_hat"], r["rho_hat"]) == (7, 1.5)
    assert set(r) >= {"k_values", "rho_values", "log_marginals", "standard_errors"}


def test_smooth_uniform_summary(tmp_path):
    summary = tmp_path / "s.json"
    io.write_json(summary, {"partition": {"knots": [0, 0.25, 0.5, 0.75, 1]}, "h_hat": [1, 1, 1, 1]})
    out, curve = tmp_path / "mix.json", tmp_path / "mix.csv"
    assert main(["smooth", "--summary", str(summary), "--N", "7", "--output", str(out),
                 "--curve-csv", str(curve)]) == 0
    mix = io.read_json(out)
    assert np.allclose(mix["weights"], 1 / 8, atol=1e-6)
    assert mix["N"] == 7


def test_qq_table(tmp_path):
    summary = tmp_path / "s.json"
    io.write_json(summary, {"partition": {"knots": [0, 0.5, 1]}, "h_hat": [1, 1]})
    out = tmp_path / "qq.csv"
    assert main(["qq", "--summary", str(summary), "--reference", "triangular", "--output", str(out)]) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert rows.shape == (99, 3)
    assert np.allclose(rows[:, 0], QQ_PROBS)
    assert np.allclose(rows[:, 1], QQ_PROBS)


def test_simulate_prior(tmp_path):
    out = tmp_path / "prior.json"
    assert main(["simulate-prior", "--output", str(out), "--k", "8", "--rho", "0.05", *FAST]) == 0
    s = io.read_json(out)
    assert s["n"] == 0 and len(s["h_hat"]) == 8


def test_random_theta(tmp_path):
    out = tmp_path / "prior.json"
    args = ["simulate-prior", "--output", str(out), "--k", "20", "--rho", "0.05",
            "--theta-gamma", "2", "0.001", "--theta-offset", "20000", *FAST]
    assert main(args) == 0
    theta_rate = io.read_json(out)["theta"]
    assert main(args + ["--gamma-param", "scale"]) == 0
    theta_scale = io.read_json(out)["theta"]
    assert theta_rate > 20000 and theta_rate != theta_scale
    assert 20000 < theta_scale < 20001


def test_malformed_csv_names_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0.1\n0.2\nabc\n")
    code = main(["fit", "--input", str(bad), "--output", str(tmp_path / "o.json"), *FAST])
    assert code == 3
    assert ":3:" in capsys.readouterr().err


def test_out_of_support_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0.1\n1.7\n")
    code = main(["fit", "--input", str(bad), "--output", str(tmp_path / "o.json"), *FAST])
    assert code == 3
    assert "1.7" in capsys.readouterr().err


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["gen-data", "--generator", "nope", "--n", "3", "--output", str(tmp_path / "x")])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--input", "x", "--output", "y", "--k", "zero"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "d.csv"
    res = subprocess.run([sys.executable, "-m", "srdensity", "gen-data", "--generator", "trunc-exp",
                          "--n", "5", "--output", str(out)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert len(out.read_text().splitlines()) == 5
    res = subprocess.run([sys.executable, "-m", "srdensity", "fit", "--input", str(tmp_path / "missing.csv"),
                          "--output", str(tmp_path / "o.json")], capture_output=True, text=True)
    assert res.returncode == 3


def test_module_errors_map_to_exit_codes(tmp_path, monkeypatch, beta_data):
    summary = tmp_path / "s.json"
    io.write_json(summary, {"partition": {"knots": [0, 0.5, 1]}, "h_hat": [1, 1]})
    assert main(["smooth", "--summary", str(summary), "--N", "501", "--output", str(tmp_path / "m.json")]) == 2

    from srdensity import cli
    from srdensity.errors import NumericalInstability

    def broken(*args, **kwargs):
        raise NumericalInstability("covariance not positive definite")

    monkeypatch.setattr(cli, "rwm_sample", broken)
    assert main(["fit", "--input", str(beta_data), "--output", str(tmp_path / "o.json"), *FAST]) == 4
