import csv
import json

import numpy as np
import pytest

from fuzzyfem.cli import ConfigError, RunConfig, main


@pytest.fixture(scope="module")
def default_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("converge") / "table.csv"
    assert main(["converge", "--out", str(out)]) == 0
    return out


def _write_config(tmp_path, **kw):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(kw))
    return str(path)


@pytest.mark.parametrize("level, nodes, elements", [(0, 7, 6), (2, 61, 96)])
def test_mesh(tmp_path, level, nodes, elements):
    out = tmp_path / "mesh.json"
    assert main(["mesh", "--side", "4", "--family", "fan", "--level", str(level), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["nodes"]) == nodes and len(doc["elements"]) == elements


@pytest.mark.parametrize("argv", [
    ["mesh", "--side", "0"],
    ["mesh", "--level", "-1"],
    ["converge", "--formulation", "Z"],
    ["converge", "--levels", "a,b"],
    ["nonsense"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_unknown_config_key(tmp_path, capsys):
    assert main(["dump-config", "--config", _write_config(tmp_path, bogus=1)]) == 2
    assert "bogus" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"D": [2, 1, 0]})


def test_missing_config_file(tmp_path):
    assert main(["dump-config", "--config", str(tmp_path / "absent.json")]) == 2


def test_no_free_nodes_is_rejected(tmp_path):
    cfg = _write_config(tmp_path, bc_mode="both", families={"fan": [0]})
    out = tmp_path / "t.csv"
    assert main(["converge", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_non_convergence_exit_3(tmp_path):
    cfg = _write_config(tmp_path, max_iter=1, tol=1e-300, families={"fan": [1]})
    out = tmp_path / "t.csv"
    assert main(["converge", "--config", cfg, "--out", str(out)]) == 3
    assert not out.exists()


def test_default_converge_table(default_csv):
    with open(default_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 88
    counts = sorted({int(r["n_elements"]) for r in rows})
    assert counts == [6, 12, 24, 48, 96, 192, 384, 1536]
    for r in rows:
        assert float(r["lambda_lo"]) <= float(r["lambda_crisp"]) <= float(r["lambda_hi"])
        if r["alpha"] == "1":
            assert r["lambda_lo"] == r["lambda_hi"] == r["lambda_crisp"]


def test_converge_levels_override(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["converge", "--family", "bisected", "--levels", "0,1", "--formulation", "B",
                 "--strategy", "corners", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert {(r["family"], r["n_elements"]) for r in rows} == {("bisected", "12"), ("bisected", "48")}


def test_membership(tmp_path):
    out = tmp_path / "m.json"
    assert main(["membership", "--family", "fan", "--levels", "0", "--out", str(out)]) == 0
    (doc,) = json.loads(out.read_text())
    poly = doc["polyline"]
    assert [doc["crisp"], 1.0] in poly
    left = [v for v, _ in poly[: len(poly) // 2]]
    assert left == sorted(left)


def test_membership_vertical_for_matched_b(tmp_path):
    out = tmp_path / "m.json"
    assert main(["membership", "--family", "fan", "--levels", "1", "--formulation", "B",
                 "--out", str(out)]) == 0
    (doc,) = json.loads(out.read_text())
    xs = [v for v, _ in doc["polyline"]]
    assert max(xs) - min(xs) <= 1e-10 * max(xs)


def _solve(tmp_path, *extra, **cfg):
    out = tmp_path / "s.json"
    argv = ["solve", "--out", str(out), *extra]
    if cfg:
        argv += ["--config", _write_config(tmp_path, **cfg)]
    assert main(argv) == 0
    return json.loads(out.read_text())


def test_solve_fixed_source(tmp_path):
    zero = _solve(tmp_path, "--fixed-source", level=1)
    assert all(v == 0 for v in zero["flux"])
    one = _solve(tmp_path, "--fixed-source", level=1, S=[1, 1, 1])
    two = _solve(tmp_path, "--fixed-source", level=1, S=[2, 2, 2])
    assert one["flux"][6] == 0.0
    np.testing.assert_allclose(two["flux"], 2 * np.asarray(one["flux"]), rtol=1e-12)


def test_solve_eigenmode(tmp_path):
    doc = _solve(tmp_path, "--bc", "boundary", level=1)
    assert doc["mode"] == "eigen" and doc["residual"] <= 1e-10
    flux = np.asarray(doc["flux"])
    assert np.all(flux[list(range(6))] == 0) and flux[6] > 0


def test_dump_config_round_trip(tmp_path):
    out = tmp_path / "c.json"
    assert main(["dump-config", "--formulation", "C", "--strategy", "box", "--out", str(out)]) == 0
    cfg = RunConfig.from_dict(json.loads(out.read_text()))
    assert cfg == cfg.canonical()
    assert cfg.formulation == "C" and cfg.strategy == "box"
    again = tmp_path / "c2.json"
    assert main(["dump-config", "--config", str(out), "--out", str(again)]) == 0
    assert again.read_text() == out.read_text()


def test_report(tmp_path):
    out = tmp_path / "r.md"
    assert main(["report", "--out", str(out)]) == 0
    text = out.read_text()
    assert "Best match" in text and text.count("\n| ") >= 10
