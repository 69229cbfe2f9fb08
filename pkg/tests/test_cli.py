"""End-to-end CLI runs: artifacts, exit codes, determinism, consistency.

Everything runs in-process through main() so coverage tools and
debuggers see it; one subprocess test checks the thread-cap env var
because that has to happen before the numerics import.
"""

import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from youngmeasure.cli import RunConfig, _parse_levels, main
from youngmeasure.errors import InputError
from youngmeasure.montecarlo import DEFAULT_SEED


def run_cli(*argv):
    return main(list(argv))


def read_csv(path):
    """(metadata dict, list of row dicts) from our commented-CSV format."""
    meta, body = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            else:
                body.append(line)
    return meta, list(csv.DictReader(body))


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture()
def harmonic8(workdir):
    assert run_cli("example", "harmonic", "--n", "8") == 0
    return workdir / "harmonic.json"


TWO_HALVES = {
    "dimension": 1,
    "codomain": [[0.0, 1.0]],
    "domain": [[[0.0, 1.0]]],
    "pieces": [
        {"subdomain": [[0.0, 0.5]], "forward": ["1/4"]},
        {"subdomain": [[0.5, 1.0]], "forward": ["3/4"]},
    ],
}


def write_spec(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_example_writes_spec_and_reference(harmonic8, workdir):
    spec = json.loads(harmonic8.read_text())
    assert spec["dimension"] == 1
    assert len(spec["pieces"]) == 7  # n = 2..8
    meta, rows = read_csv(workdir / "harmonic-reference.csv")
    assert meta["builtin"] == "harmonic" and meta["truncate"] == "8"
    assert "version" in meta and "time" not in str(meta).lower()
    assert float(meta["tail_bound"]) == pytest.approx(1 / 8)
    assert len(rows) >= 4096


def test_density_then_prob_agree(harmonic8, workdir, capsys):
    assert run_cli("density", "--input", str(harmonic8), "--output", "d.csv") == 0
    capsys.readouterr()
    assert (
        run_cli("prob", "--input", str(harmonic8), "--interval", "0.25", "0.5") == 0
    )
    prob = json.loads(capsys.readouterr().out)["value"]

    meta, rows = read_csv(workdir / "d.csv")
    y = np.array([float(r["y"]) for r in rows])
    g = np.array([float(r["g"]) for r in rows])
    a, b = 0.25, 0.5
    inner = (y > a) & (y < b)
    yy = np.concatenate([[a], y[inner], [b]])
    gg = np.concatenate([[np.interp(a, y, g)], g[inner], [np.interp(b, y, g)]])
    integral = float(np.trapezoid(gg, yy))
    # end-to-end consistency: table quadrature against the closed-form preimage
    assert abs(integral - prob) <= float(meta["q_tol"]) + 1e-9


def test_atoms_two_piece_constant_spec(workdir, capsys):
    spec = write_spec(workdir / "two.json", TWO_HALVES)
    assert run_cli("atoms", "--input", str(spec)) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["variant"] == "atoms"
    assert payload["atoms"] == [[0.25, 0.5], [0.75, 0.5]]


def test_prob_reversed_interval_is_input_error(harmonic8, capsys):
    rc = run_cli("prob", "--input", str(harmonic8), "--interval", "0.5", "0.25")
    assert rc == 1


def test_sample_csv_ks_and_plot(workdir, capsys):
    rc = run_cli(
        "sample", "--input", "identity", "--n", "5000", "--seed", "11",
        "--output", "s.csv", "--cap", "200", "--plot",
    )
    assert rc == 0
    meta, rows = read_csv(workdir / "s.csv")
    assert meta["seed"] == "11" and meta["n"] == "5000"
    assert "capped" in meta and len(rows) == 200
    ys = [float(r["y"]) for r in rows]
    assert ys == sorted(ys)
    ks = json.loads((workdir / "s.ks.json").read_text())
    assert ks["statistic"] < ks["threshold"] == pytest.approx(1.63 / math.sqrt(5000))
    assert (workdir / "s.svg").read_text().startswith("<svg")


def test_sample_spec_file_has_no_ks(workdir):
    spec = write_spec(workdir / "two.json", TWO_HALVES)
    assert run_cli("sample", "--input", str(spec), "--n", "100", "--output", "t.csv") == 0
    assert (workdir / "t.csv").exists()
    assert not (workdir / "t.ks.json").exists()


def test_functional_matches_library_and_n_alias(workdir, capsys):
    assert (
        run_cli("functional", "--input", "identity", "--beta", "s", "--n", "2000") == 0
    )
    payload = json.loads(capsys.readouterr().out)
    from youngmeasure.analytic import builtin_function
    from youngmeasure.measures import probe
    from youngmeasure.montecarlo import young_functional_mc

    f, _ = builtin_function("identity")
    direct = young_functional_mc(f, probe("s"), 2000, DEFAULT_SEED)
    assert payload["monte_carlo"]["value"] == direct.value
    assert payload["monte_carlo"]["seed"] == DEFAULT_SEED
    assert payload["quadrature"]["value"] == pytest.approx(0.5, abs=1e-12)


def test_approx_report(workdir):
    rc = run_cli(
        "approx", "--input", "identity", "--levels", "2,4..6",
        "--suite", "monomial", "--output", "r.csv",
    )
    assert rc == 0
    meta, rows = read_csv(workdir / "r.csv")
    assert meta["suite"].startswith("monomial")
    assert "reference" in meta
    assert [int(r["level"]) for r in rows] == [2, 4, 5, 6]
    gaps = [float(r["gap"]) for r in rows]
    assert gaps[-1] < gaps[0]


def test_validate_ok_and_failing(workdir, capsys):
    assert run_cli("validate", "--input", "harmonic", "--truncate", "8") == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True

    bad = {
        "dimension": 1,
        "codomain": [[0.0, 1.0]],
        "domain": [[[0.0, 1.0]]],
        "pieces": [
            {"subdomain": [[0.0, 0.6]], "forward": ["1/4"]},
            {"subdomain": [[0.4, 1.0]], "forward": ["3/4"]},
        ],
    }
    spec = write_spec(workdir / "bad.json", bad)
    assert run_cli("validate", "--input", str(spec), "--output", "v.json") == 1
    report = json.loads((workdir / "v.json").read_text())
    assert report["ok"] is False and report["overlaps"] == [[0, 1]]


def test_exit_codes(workdir, capsys):
    assert run_cli("density", "--input", "missing.json", "--output", "x.csv") == 3
    assert run_cli("bogus") == 1
    assert run_cli("density", "--input", "identity") == 1  # --output required
    parabola = {
        "dimension": 1,
        "codomain": [[0.0, 1.0]],
        "domain": [[[-1.0, 1.0]]],
        "pieces": [{"subdomain": [[-1.0, 1.0]], "forward": ["x^2"]}],
    }
    spec = write_spec(workdir / "par.json", parabola)
    assert run_cli("density", "--input", str(spec), "--output", "p.csv") == 2
    assert run_cli("density", "--input", "identity", "--output", "/no/dir/x.csv") == 3


def test_rerun_is_byte_identical(workdir, capsys):
    args = (
        "sample", "--input", "square", "--n", "2000", "--seed", "5",
        "--output", "a.csv", "--plot",
    )
    assert run_cli(*args) == 0
    first = {
        p.name: p.read_bytes() for p in (workdir / ".").iterdir() if p.is_file()
    }
    for p in workdir.iterdir():
        p.unlink()
    assert run_cli(*args) == 0
    second = {p.name: p.read_bytes() for p in workdir.iterdir() if p.is_file()}
    assert first == second
    assert {"a.csv", "a.ks.json", "a.svg"} <= set(first)


def test_thread_cap_applies_before_numerics():
    code = (
        "import os; import youngmeasure.cli; "
        "print(os.environ.get('OMP_NUM_THREADS', 'unset'))"
    )
    env = dict(os.environ, YM_THREADS="1")
    env.pop("OMP_NUM_THREADS", None)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "1"


def test_runconfig_validates_numeric_ranges():
    with pytest.raises(InputError):
        RunConfig(command="density", grid=1)
    with pytest.raises(InputError):
        RunConfig(command="sample", samples=0)
    with pytest.raises(InputError):
        RunConfig(command="nonsense")
    cfg = RunConfig(command="sample")
    assert cfg.resolved_seed == DEFAULT_SEED
    assert RunConfig(command="sample", seed=3).resolved_seed == 3


def test_parse_levels():
    assert _parse_levels("1,2,4") == (1, 2, 4)
    assert _parse_levels("2..5") == (2, 3, 4, 5)
    assert _parse_levels("1,3..5,8") == (1, 3, 4, 5, 8)
    with pytest.raises(InputError):
        _parse_levels("a,b")
    with pytest.raises(InputError):
        _parse_levels("")
