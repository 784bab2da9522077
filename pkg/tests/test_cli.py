import csv
import json
import math

import numpy as np
import pytest

from qharmonic import PhaseGrid, Region, build_symbol, gaussian_window, io, rank_one, weyl_quantize
from qharmonic.cli import RunConfig, UsageError, run
from qharmonic.phase_space import random_bandlimited_symbol


@pytest.fixture
def files(tmp_path, grid):
    tau = random_bandlimited_symbol(grid, Region.disc(2), 3)
    io.write_symbol(tmp_path / "tau.sym", tau)
    io.write_symbol(tmp_path / "proj.sym", build_symbol(grid, {"kind": "gaussian", "amplitude": 2,
                                                               "width": 2**-0.5}))
    io.write_vector(tmp_path / "phi0.vec", gaussian_window(grid))
    return tmp_path


def test_quantize_symbol_round_trip(files):
    assert run(["quantize", str(files / "tau.sym"), str(files / "tau.op")]) == 0
    assert run(["symbol", str(files / "tau.op"), str(files / "back.sym")]) == 0
    a = io.read_symbol(files / "tau.sym").values
    b = io.read_symbol(files / "back.sym").values
    assert np.linalg.norm(a - b) <= 1e-10 * np.linalg.norm(a)


def test_schatten_gaussian_projector(files, capsys):
    assert run(["quantize", str(files / "proj.sym"), str(files / "proj.op")]) == 0
    assert run(["schatten", str(files / "proj.op"), "--p", "1,2,4,inf"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [n["p"] for n in doc["norms"]] == [1.0, 2.0, 4.0, "inf"]
    for n in doc["norms"]:
        assert n["value"] == pytest.approx(1.0, abs=1e-6)
        assert n["rank"] == 1


def test_wigner_and_transforms(files, grid):
    v = str(files / "phi0.vec")
    assert run(["wigner", v, v, str(files / "w.sym")]) == 0
    W = io.read_symbol(files / "w.sym")
    assert W.values[grid.point_index((0, 0))] == pytest.approx(2.0, abs=1e-12)
    assert run(["sfourier", str(files / "w.sym"), str(files / "fw.sym")]) == 0
    assert run(["convolve", str(files / "w.sym"), str(files / "proj.sym"), str(files / "c.sym")]) == 0
    c = io.read_symbol(files / "c.sym")
    assert c.values[grid.point_index((0, 0))] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("method", ["fast", "direct"])
def test_opconv(tmp_path, method):
    g = PhaseGrid(64, 4.0)
    P = rank_one(gaussian_window(g), gaussian_window(g))
    io.write_operator(tmp_path / "p.op", P)
    assert run(["opconv", str(tmp_path / "p.op"), str(tmp_path / "p.op"), str(tmp_path / "o.sym"),
                "--method", method]) == 0
    X, XI = g.mesh()
    np.testing.assert_allclose(io.read_symbol(tmp_path / "o.sym").values,
                               np.exp(-np.pi * (X**2 + XI**2)), atol=1e-12)


def test_verify_reference_run(tmp_path):
    out, table = tmp_path / "v.json", tmp_path / "v.csv"
    code = run(["verify", "--omega", "disc:2", "--p", "1,2,inf", "--samples", "50", "--N", "256",
                "--L", "8", "--seed", "7", "--out", str(out), "--csv", str(table)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["reports"]) == 150 and all(r["pass"] for r in doc["reports"])
    assert all(r["pass"] for r in doc["young_reports"])
    assert doc["pass"] and "timestamp" in doc
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 150
    assert all(math.isfinite(float(r["ratio"])) for r in rows)


def test_verify_is_reproducible(tmp_path):
    args = ["verify", "--omega", "disc:1.5", "--p", "2", "--samples", "2", "--N", "64", "--L", "4",
            "--margin", "0.25", "--no-timestamp", "--seed", "3"]
    assert run(args + ["--out", str(tmp_path / "a.json")]) == 0
    assert run(args + ["--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_verify_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 64, "L": 4, "omega": "disc:1.5", "p": [1, "inf"], "samples": 1,
                               "margin": 0.25}))
    assert run(["verify", "--config", str(cfg), "--out", str(tmp_path / "o.json")]) == 0
    doc = json.loads((tmp_path / "o.json").read_text())
    assert doc["p"] == [1.0, "inf"] and len(doc["reports"]) == 2


def test_verify_given_symbol(files):
    out = files / "one.json"
    assert run(["verify", "--symbol", str(files / "tau.sym"), "--p", "1,inf", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["reports"]) == 2


def test_hypothesis_violation_exit_code(files, capsys):
    code = run(["verify", "--symbol", str(files / "proj.sym"), "--omega", "disc:0.5"])
    assert code == 3
    assert "hypothesis violated" in capsys.readouterr().err


def test_estimate_constant(tmp_path):
    out = tmp_path / "e.json"
    assert run(["estimate-constant", "--omega", "disc:1.5", "--p", "inf", "--samples", "3", "--N", "64",
                "--L", "4", "--margin", "0.25", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["samples"] == 3 and doc["p"] == "inf"
    assert 1.0 <= doc["ratios"]["min"] <= doc["ratios"]["mean"] <= doc["ratios"]["max"]
    assert doc["grid"] == {"N": 64, "L": 4.0} and doc["seed"] == 0


def test_selftest_command(capsys):
    assert run(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 15


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--p", "0.5"],
        ["verify", "--omega", "blob:2"],
        ["verify", "--omega", "disc:7", "--N", "64", "--L", "4"],
        ["verify", "--samples", "0"],
        ["verify", "--N", "63"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"N": 64, "colour": "red"}')
    assert run(["verify", "--config", str(cfg)]) == 2
    with pytest.raises(UsageError):
        RunConfig.from_mapping({"colour": "red"})


def test_missing_input_file(tmp_path, capsys):
    assert run(["quantize", str(tmp_path / "missing"), str(tmp_path / "out")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_corrupt_input_reports_offset(files, capsys):
    p = files / "tau.sym"
    p.write_bytes(p.read_bytes()[:-1])
    assert run(["quantize", str(p), str(files / "x.op")]) == 2
    assert "byte offset" in capsys.readouterr().err


def test_wrong_kind_of_file(files):
    assert run(["symbol", str(files / "tau.sym"), str(files / "x.sym")]) == 2


def test_failed_bound_exit_code(files, grid, monkeypatch):
    import qharmonic.cli as cli

    real = cli.verify_bound_chain

    def sabotaged(*a, **kw):
        lo, yg = real(*a, **kw)
        lo.passed = False
        return lo, yg

    monkeypatch.setattr(cli, "verify_bound_chain", sabotaged)
    assert run(["verify", "--symbol", str(files / "tau.sym"), "--p", "2", "--out", str(files / "f.json")]) == 1
    assert json.loads((files / "f.json").read_text())["pass"] is False


def test_quantize_output_matches_library(files, grid):
    run(["quantize", str(files / "tau.sym"), str(files / "t.op")])
    K = weyl_quantize(io.read_symbol(files / "tau.sym")).kernel
    assert io.read_operator(files / "t.op").kernel.tobytes() == K.tobytes()
