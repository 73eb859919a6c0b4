import json
import os

import numpy as np
import pytest

from legendre_spectra import LegendreSeries, evaluate, product_coefficients_finite, project
from legendre_spectra.cli import main
from legendre_spectra.expansion import parse_sampler
from legendre_spectra.files import fmt, load_solve_job, read_series_csv, write_series_csv

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def run(*argv):
    return main([str(a) for a in argv])


def manifest_paths(path):
    doc = json.loads(path.read_text())
    return {e["path"] for e in doc["outputs"]}, doc


def write_spec(path, **doc):
    path.write_text(json.dumps(doc))
    return path


# --- formatting and series files ---------------------------------------------

def test_fmt():
    assert fmt(3) == "3"
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3


def test_series_roundtrip(tmp_path):
    s = LegendreSeries([0.1, -2.5e-300, 1 / 3])
    write_series_csv(tmp_path / "s.csv", s)
    assert read_series_csv(tmp_path / "s.csv") == s


@pytest.mark.parametrize(
    "text,line",
    [
        ("n,coefficient\n0,1\n2,3\n", 3),
        ("n,coefficient\n0,abc\n", 2),
        ("n,coefficient\n0,1\n1,nan\n", 3),
        ("n,coef\n0,1\n", 1),
        ("n,coefficient\n0\n", 2),
    ],
)
def test_series_parse_errors_name_line(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError, match=f"bad.csv:{line}:"):
        read_series_csv(p)


# --- expand ------------------------------------------------------------------

def test_expand_x_squared(tmp_path, capsys):
    out = tmp_path / "x2.csv"
    assert run("expand", "poly:[0,0,1]", "--degree", 4, "-o", out) == 0
    np.testing.assert_allclose(read_series_csv(out).coefficients, [1 / 3, 0, 2 / 3, 0, 0], atol=1e-14)
    assert "0.3333333333333" in capsys.readouterr().out


def test_expand_even_function(tmp_path):
    out = tmp_path / "g.csv"
    assert run("expand", "manufactured_g", "--degree", 30, "-o", out) == 0
    c = read_series_csv(out).coefficients
    assert np.max(np.abs(c[1::2])) < 1e-12 and np.all(c[::2] > 0)


def test_expand_exp_degree_zero(tmp_path, capsys):
    assert run("expand", "exp", "--degree", 0, "-o", tmp_path / "e.csv") == 0
    assert read_series_csv(tmp_path / "e.csv").coefficients[0] == pytest.approx(1.1752011936438014)


def test_expand_roundtrip_evaluation(tmp_path):
    out = tmp_path / "s.csv"
    assert run("expand", "sin_k:3", "--degree", 20, "-o", out) == 0
    mem = project(parse_sampler("sin_k:3"), 20)
    x = np.linspace(-1, 1, 50)
    np.testing.assert_allclose(evaluate(read_series_csv(out), x), evaluate(mem, x), atol=1e-14)


def test_expand_from_coefficient_file(tmp_path):
    src = tmp_path / "src.csv"
    write_series_csv(src, LegendreSeries([1.0, 0.5, 0.25]))
    out = tmp_path / "out.csv"
    assert run("expand", src, "--degree", 4, "-o", out) == 0
    np.testing.assert_allclose(read_series_csv(out).coefficients, [1, 0.5, 0.25, 0, 0], atol=1e-14)
    _, doc = manifest_paths(tmp_path / "out.csv.manifest.json")
    assert str(src) in doc["inputs"]


def test_expand_unknown_function_is_usage_error(tmp_path, capsys):
    assert run("expand", "nope", "--degree", 3, "-o", tmp_path / "n.csv") == 2
    assert "known:" in capsys.readouterr().err


def test_expand_quad_margin_env(tmp_path, monkeypatch):
    monkeypatch.setenv("LEGENDRE_SPECTRA_QUAD_MARGIN", "3")
    assert run("expand", "exp", "--degree", 5, "-o", tmp_path / "e.csv") == 0
    _, doc = manifest_paths(tmp_path / "e.csv.manifest.json")
    assert doc["parameters"]["quadrature_order"] == 8


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--j", "3", "-o", "x.csv"])
    assert info.value.code == 2


# --- product -----------------------------------------------------------------

@pytest.fixture
def x_csv(tmp_path):
    p = tmp_path / "x.csv"
    write_series_csv(p, LegendreSeries([0.0, 1.0]))
    return p


def test_product_finite(tmp_path, x_csv):
    out = tmp_path / "xx.csv"
    assert run("product", x_csv, x_csv, "-o", out) == 0
    np.testing.assert_allclose(read_series_csv(out).coefficients, [1 / 3, 0, 2 / 3], atol=1e-16)


def test_product_with_constant_one(tmp_path):
    one, b = tmp_path / "one.csv", tmp_path / "b.csv"
    write_series_csv(one, LegendreSeries([1.0]))
    write_series_csv(b, LegendreSeries([0.5, -1.0, 2.0]))
    assert run("product", one, b, "-o", tmp_path / "p.csv") == 0
    assert (tmp_path / "p.csv").read_text() == b.read_text()


def test_product_mu_with_bound_column(tmp_path):
    f, g = tmp_path / "f.csv", tmp_path / "g.csv"
    assert run("expand", "manufactured_g", "--degree", 40, "-o", f) == 0
    assert run("expand", "exp", "--degree", 40, "-o", g) == 0
    out = tmp_path / "mu.csv"
    assert run("product", f, g, "--mode", "mu", "--M", 10, "--degree", 12, "--A1", 1.65, "--B1", 2.5, "-o", out) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert (tmp_path / "mu.csv").read_text().splitlines()[0] == "n,coefficient,bound"
    full = product_coefficients_finite(read_series_csv(f), read_series_csv(g)).coefficients[:13]
    assert np.all(np.abs(rows[:, 1] - full) <= rows[:, 2])


def test_product_errors(tmp_path, x_csv):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,coefficient\n0,1\nx,2\n")
    assert run("product", bad, x_csv, "-o", tmp_path / "o.csv") == 3
    assert run("product", tmp_path / "missing.csv", x_csv, "-o", tmp_path / "o.csv") == 3
    assert run("product", x_csv, x_csv, "--mode", "mu", "-o", tmp_path / "o.csv") == 2
    assert run("product", x_csv, x_csv, "--mode", "mu", "--M", 2, "--A1", 1, "--B1", 1, "-o", tmp_path / "o.csv") == 2


# --- bounds --------------------------------------------------------------------

def test_bounds_j1(tmp_path):
    out = tmp_path / "b1.csv"
    assert run("bounds", "--k", 2, "--j", 1, "-o", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "M,bound_j1,log_bound_j1"
    assert len(lines) == 1 + 98
    row = dict((int(l.split(",")[0]), float(l.split(",")[1])) for l in lines[1:])
    assert row[10] == pytest.approx(0.020204, abs=1e-6)


def test_bounds_j2(tmp_path):
    out = tmp_path / "b2.csv"
    assert run("bounds", "--k", 2, "--j", 2, "-o", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "M,bound_j2,log_bound_j2"
    assert lines[1].startswith("4,")


def test_bounds_range_violation(tmp_path):
    assert run("bounds", "--j", 1, "--M-min", 2, "-o", tmp_path / "b.csv") == 2
    assert run("bounds", "--j", 2, "--M-min", 3, "-o", tmp_path / "b.csv") == 2


# --- solve ---------------------------------------------------------------------

def test_solve_zero(tmp_path):
    spec = write_spec(tmp_path / "zero.json", c=1.0, N=6, initial=[0.0], forcing=[], dt=0.01, steps=120, N_prime=4)
    out = tmp_path / "run"
    assert run("solve", spec, "-o", out) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,n,a_n"
    assert len(lines) == 1 + 121 * 7
    assert all(l.endswith(",0") for l in lines[1:])


def test_solve_linear_matches_exact_decay(tmp_path, capsys):
    spec = write_spec(tmp_path / "lin.json", c=0.0, N=6, initial=[1.0, 1.0, 0.5], forcing=[], dt=0.01, steps=100, N_prime=2)
    out = tmp_path / "run"
    assert run("solve", spec, "-o", out) == 0
    data = np.loadtxt(out / "trajectory.csv", delimiter=",", skiprows=1)
    for n, a0 in enumerate([1.0, 1.0, 0.5]):
        rows = data[data[:, 1] == n]
        np.testing.assert_allclose(rows[:, 2], a0 * np.exp(-n * (n + 1) * rows[:, 0]), rtol=1e-6)
    assert "free_diffusion" in capsys.readouterr().out
    assert (out / "errors.csv").exists()


def test_solve_outputs_and_manifest(tmp_path):
    spec = write_spec(
        tmp_path / "forced.json",
        c=1.0, N=10, initial="manufactured_g",
        forcing=[{"rate": 1.0, "spatial": "manufactured_forcing_decay"},
                 {"rate": 2.0, "spatial": "manufactured_forcing_square"}],
        dt=0.01, steps=120, N_prime=6,
    )
    out = tmp_path / "run"
    assert run("solve", spec, "-o", out, "--report-steps", "0,60,120", "--n-primes", "2,6") == 0
    listed, doc = manifest_paths(out / "manifest.json")
    on_disk = {p.name for p in out.iterdir()}
    assert on_disk == listed
    assert doc["parameters"]["report_steps"] == [0, 60, 120]
    assert doc["parameters"]["substeps"] == 1
    header = (out / "reconstruction_Nprime6.csv").read_text().splitlines()[0]
    assert header == "t,x,T_computed,T_exact,abs_err"
    assert len((out / "reconstruction_Nprime6.csv").read_text().splitlines()) == 1 + 3 * 401


def test_solve_manufactured_case(tmp_path):
    spec = write_spec(tmp_path / "m.json", case="manufactured", N=30, dt=0.01, steps=500, N_prime=6)
    out = tmp_path / "run"
    assert run("solve", spec, "-o", out) == 0
    rows = np.loadtxt(out / "errors.csv", delimiter=",", skiprows=1)
    n6 = rows[rows[:, 2] == 6]
    assert n6[:, 0].tolist() == [100, 500]
    assert np.all(n6[:, 3] < 0.01)


def test_solve_is_deterministic(tmp_path):
    spec = write_spec(tmp_path / "m.json", case="manufactured", N=12, dt=0.01, steps=150, N_prime=6)
    assert run("solve", spec, "-o", tmp_path / "a") == 0
    assert run("solve", spec, "-o", tmp_path / "b") == 0
    for name in ("trajectory.csv", "reconstruction_Nprime6.csv", "errors.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_solve_divergence_exit_code(tmp_path, capsys):
    spec = write_spec(tmp_path / "blow.json", c=1.0, N=2, initial=[10.0], forcing=[], dt=0.01, steps=500, N_prime=0, substeps=1)
    assert run("solve", spec, "-o", tmp_path / "run") == 4
    assert "diverged in step" in capsys.readouterr().err


@pytest.mark.parametrize(
    "doc,code",
    [
        ({"c": 1, "N": 3, "initial": [0], "dt": 0.01, "N_prime": 1}, 3),
        ({"c": 1, "N": 3, "initial": {"a": 1}, "dt": 0.01, "steps": 5, "N_prime": 1}, 3),
        ({"c": "x", "N": 3, "initial": [0], "dt": 0.01, "steps": 5, "N_prime": 1}, 3),
        ({"c": 1, "N": 3, "initial": "nope", "dt": 0.01, "steps": 5, "N_prime": 1}, 2),
        ({"c": 1, "N": 3, "initial": [0], "dt": 0.01, "steps": 5, "N_prime": 4}, 2),
        ({"case": "other", "N": 3, "dt": 0.01, "steps": 5, "N_prime": 1}, 3),
    ],
)
def test_solve_bad_specs(tmp_path, doc, code):
    spec = write_spec(tmp_path / "s.json", **doc)
    assert run("solve", spec, "-o", tmp_path / "run") == code


def test_solve_invalid_json(tmp_path):
    p = tmp_path / "s.json"
    p.write_text("{\n  \"c\": 1,\n  oops\n}")
    assert run("solve", p, "-o", tmp_path / "run") == 3


def test_shipped_specs_parse():
    for name in ("manufactured", "zero", "linear", "forced"):
        job = load_solve_job(os.path.join(DATA, f"{name}.json"))
        assert job.config.steps > 0


# --- verify --------------------------------------------------------------------

def test_verify_subset(capsys):
    assert run("verify", "--only", "1,5") == 0
    out = capsys.readouterr().out
    assert "[PASS] 1." in out and "[PASS] 5." in out and "2/2" in out


def test_verify_unknown_criterion():
    assert run("verify", "--only", "99") == 2
