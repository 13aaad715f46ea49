import json
import math

import numpy as np
import pytest

from diracspec.cli import CliParseError, main, parse_spectral_json
from diracspec.core import Grid, read_potential_csv, write_potential_csv
from diracspec.core import PotentialMatrix
from diracspec.isospectral import omega_l1_distance, zero_family


def _run(argv):
    return main([str(a) for a in argv])


def test_spectrum_zero_potential_lattice(tmp_path):
    out = tmp_path / "spec.json"
    rc = _run(["spectrum", "--grid", 512, "--nmin", -3, "--nmax", 3, "--out", out])
    assert rc == 0
    obj = json.loads(out.read_text())
    for rec in obj["items"]:
        assert rec["lambda"] == pytest.approx(rec["n"], abs=1e-8)
        assert rec["a"] == pytest.approx(math.pi, abs=1e-8)
    assert (tmp_path / "spec.json.config.json").exists()


def test_spectral_json_round_trip(tmp_path):
    out = tmp_path / "spec.json"
    _run(["spectrum", "--grid", 512, "--nmin", -2, "--nmax", 2, "--out", out])
    data = parse_spectral_json(str(out))
    again = tmp_path / "again.json"
    data.save(again)
    assert json.loads(out.read_text())["items"] == json.loads(again.read_text())["items"]


def test_unsorted_items_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "alpha": 0.0, "beta": 0.0,
        "items": [{"n": 1, "lambda": 1.0}, {"n": 0, "lambda": 0.0}],
    }))
    with pytest.raises(CliParseError):
        parse_spectral_json(str(path))
    rc = _run(["two-spectra", "--spec-a", path, "--spec-e", path,
               "--trunc", 1, "--out", tmp_path / "o.json"])
    assert rc == 2


def test_potential_csv_round_trip(tmp_path):
    g = Grid(0.0, math.pi, 64)
    pot = PotentialMatrix.from_samples(np.cos(g.nodes), np.sin(g.nodes), g)
    path = tmp_path / "pot.csv"
    write_potential_csv(pot, path)
    back = read_potential_csv(path)
    assert np.array_equal(back.p, pot.p)
    assert np.array_equal(back.q, pot.q)


def test_isospectral_matches_zero_family(tmp_path):
    out = tmp_path / "omega.csv"
    rc = _run(["isospectral", "--shift", "1=0.5", "--grid", 2048,
               "--format", "csv", "--out", out])
    assert rc == 0
    got = read_potential_csv(out)
    assert omega_l1_distance(got, zero_family(1, 0.5, Grid(0.0, math.pi, 2048))) < 1e-6


def test_output_deterministic(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        _run(["spectrum", "--grid", 512, "--nmin", -2, "--nmax", 2, "--out", out])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_exit_2_on_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"items": [')
    rc = _run(["reconstruct", "--spec", path, "--out", tmp_path / "o.json"])
    assert rc == 2


def test_exit_3_on_domain_failure(tmp_path):
    # two identical boundary angles is valid JSON but inconsistent data
    spec = tmp_path / "s.json"
    items = [{"n": n, "lambda": float(n), "a": math.pi} for n in range(-3, 4)]
    spec.write_text(json.dumps({"alpha": 0.0, "beta": 0.0, "items": items}))
    rc = _run(["two-spectra", "--spec-a", spec, "--spec-e", spec,
               "--trunc", 2, "--out", tmp_path / "o.json"])
    assert rc == 3


def test_weyl_command(tmp_path):
    out = tmp_path / "m.json"
    rc = _run(["weyl", "--mu", 50.0, "--xmax", 14.0, "--out", out])
    assert rc == 0
    obj = json.loads(out.read_text())
    assert abs(complex(obj["m0"]["re"], obj["m0"]["im"]) - 1j) < 0.05


def test_check_suite_passes(capsys):
    assert _run(["check"]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text
