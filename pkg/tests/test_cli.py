import csv
import io
import json
import subprocess
import sys

import pytest

from freeclt.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def strip_timing(doc):
    doc = dict(doc)
    doc["manifest"] = {k: v for k, v in doc["manifest"].items() if k != "wall_time"}
    doc.pop("runtime", None)
    return doc


def test_c0(capsys):
    code, out, _ = call(capsys, "c0", "--sigma2", "1")
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["c0"] - 2.0805) < 5e-5
    assert abs(doc["alpha0"] - 1.0034) < 5e-4
    m = doc["manifest"]
    assert m["subcommand"] == "c0" and m["bits"] == 256 and m["seed"] == 0
    assert {"version", "wall_time", "flags"} <= set(m)


def test_moments_csv(capsys):
    code, out, _ = call(capsys, "moments", "--kmax", "3", "--sigma2", "1")
    table = rows(out)
    assert code == 0
    assert table[0] == ["k", "value"]
    assert [r[0] for r in table[1:]] == ["1", "2", "3"]
    vals = [float(r[1]) for r in table[1:]]
    for got, want in zip(vals, (1.6487212707, 5.4365636569, 24.6492899)):
        assert abs(got / want - 1) < 1e-9


def test_rational_sigma(capsys):
    code, out, _ = call(capsys, "log-moments", "--kmax", "1", "--sigma2", "1/4", "--exact")
    assert code == 0
    # s + s**2/12 at s = 1/4
    assert rows(out)[1] == ["1", "49/192"]


def test_series_verify(capsys):
    code, out, _ = call(capsys, "series-verify")
    doc = json.loads(out)
    assert code == 0
    assert {k: doc[k] for k in ("g3", "g4", "h3", "h4", "limit_S")} == dict.fromkeys(
        ("g3", "g4", "h3", "h4", "limit_S"), "pass")


def test_radius_csv_and_sidecar(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = call(capsys, "radius", "--kind", "log", "--kmax", "5", "--out", str(out))
    assert code == 0
    table = rows(out.read_text())
    assert table[0] == ["k", "r_k"]
    assert len(table) == 6
    side = json.loads((tmp_path / "r.csv.json").read_text())
    assert side["monotone_decreasing"] is True
    assert side["manifest"]["flags"]["kind"] == "log"


def test_catalan_flag_changes_radius(capsys):
    _, a, _ = call(capsys, "radius", "--kind", "log", "--kmax", "2")
    _, b, _ = call(capsys, "radius", "--kind", "log", "--kmax", "2", "--catalan-as-printed")
    assert a != b


def test_mgf_even(capsys):
    code, out, _ = call(capsys, "mgf", "--smin", "-2", "--smax", "2", "--points", "5")
    vals = [r[1] for r in rows(out)[1:]]
    assert code == 0
    assert vals == vals[::-1]


def test_asym(capsys):
    code, out, _ = call(capsys, "asym", "--kmin", "100", "--kmax", "100")
    table = rows(out)
    assert table[0] == ["k", "value", "asymptotic", "rel_error"]
    assert abs(float(table[1][3])) < 0.02


def test_monotone(capsys):
    code, out, _ = call(capsys, "monotone", "--K", "30", "--J", "10")
    doc = json.loads(out)
    assert code == 0
    assert doc["pass"] is True and doc["bits"] == 1024
    assert {"min_margin", "error_bound", "runtime"} <= set(doc)


def test_density(capsys):
    code, out, _ = call(capsys, "density", "--bins", "11")
    table = rows(out)
    assert table[0] == ["bin_left", "bin_right", "density"]
    mass = sum((float(b) - float(a)) * float(d) for a, b, d in table[1:])
    assert code == 0 and abs(mass - 1) < 1e-12


def test_simulate_outputs(capsys, tmp_path):
    out = tmp_path / "hist.csv"
    argv = ["simulate", "--dim", "16", "--factors", "4", "--trials", "3", "--seed", "42",
            "--bins", "15", "--out", str(out)]
    code, _, _ = call(capsys, *argv)
    assert code == 0
    table = rows(out.read_text())
    assert table[0] == ["bin_left", "bin_right", "density"] and len(table) == 16
    side = json.loads((tmp_path / "hist.csv.json").read_text())
    assert side["config"]["seed"] == 42 and side["config"]["dim"] == 16
    assert {"empirical_moments", "max_abs_log_eig", "manifest"} <= set(side)
    first = out.read_text()
    call(capsys, *argv)
    assert out.read_text() == first
    again = json.loads((tmp_path / "hist.csv.json").read_text())
    assert strip_timing(again) == strip_timing(side)


def test_bits_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("FREECLT_BITS", "96")
    _, out, _ = call(capsys, "c0")
    assert json.loads(out)["manifest"]["bits"] == 96
    _, out, _ = call(capsys, "c0", "--bits", "128")
    assert json.loads(out)["manifest"]["bits"] == 128


@pytest.mark.parametrize(
    "argv",
    [["bogus"], ["c0", "--nope"], ["moments"], ["moments", "--kmax", "0"], ["c0", "--sigma2", "-1"],
     ["c0", "--bits", "32"], ["simulate", "--dim", "1"], []],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1
    assert err


def test_numerical_failure_exits_two(capsys):
    code, _, err = call(capsys, "monotone", "--K", "120", "--J", "100", "--bits", "64")
    assert code == 2
    assert "numerical" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "freeclt", "c0"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["c0"] == pytest.approx(2.0804576, abs=1e-7)
