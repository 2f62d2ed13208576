import csv
import io
import json
import math

import numpy as np
import pytest

from qwscatter import constructions as C
from qwscatter.cli import main
from qwscatter.graphcore import is_isomorphic, load_gadget, save_gadget


@pytest.fixture
def switch13(tmp_path):
    p = tmp_path / "switch13.json"
    p.write_text(save_gadget(C.cgw13_switch()))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_smatrix_json(capsys, switch13):
    code, out, _ = run(capsys, "smatrix", "--gadget", switch13, "--k", "1/4")
    assert code == 0
    doc = json.loads(out)
    S = np.array([[complex(*z) for z in row] for row in doc[0]["matrix"]])
    w = np.exp(-1j * math.pi / 4)
    np.testing.assert_allclose(S, [[0, 0, w], [0, -1, 0], [w, 0, 0]], atol=1e-8)
    assert doc[0]["unitarity_error"] < 1e-9


def test_smatrix_csv(capsys, switch13):
    code, out, _ = run(capsys, "smatrix", "--gadget", switch13, "--k", "1/2", "--k", "1/4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 18
    assert rows[0].keys() == {"k", "row", "col", "magnitude", "phase"}


def test_smatrix_random_k_seeded(capsys, switch13):
    a = run(capsys, "smatrix", "--gadget", switch13, "--random-k", "3", "--seed", "4")[1]
    b = run(capsys, "smatrix", "--gadget", switch13, "--random-k", "3", "--seed", "4")[1]
    c = run(capsys, "smatrix", "--gadget", switch13, "--random-k", "3", "--seed", "5")[1]
    assert a == b and a != c


def test_check_switch(capsys, switch13):
    code, out, _ = run(capsys, "check-switch", "--gadget", switch13, "--D", "1/2", "--Dp", "1/4")
    assert code == 0 and json.loads(out)["is_switch"]
    code, _, err = run(capsys, "check-switch", "--gadget", switch13, "--D", "1/4", "--Dp", "1/2")
    assert code == 2 and json.loads(err)["error"] == "verification"


def test_input_errors(capsys, tmp_path, switch13):
    code, _, err = run(capsys, "smatrix", "--gadget", str(tmp_path / "missing.json"), "--k", "1/4")
    assert code == 1 and json.loads(err)["error"] == "input"
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": 2, "edges": [[0, 1]], "terminals": [0, 0]}')
    code, _, err = run(capsys, "smatrix", "--gadget", str(bad), "--k", "1/4")
    assert code == 1 and "duplicate terminal" in json.loads(err)["message"]
    code, _, err = run(capsys, "smatrix", "--gadget", switch13, "--k", "5/4")
    assert code == 1


def test_build_with_sidecar(capsys, tmp_path):
    out = tmp_path / "p.json"
    code, _, _ = run(capsys, "build", "path", "2", "3", "--out", str(out))
    assert code == 0
    g = load_gadget(out.read_text())
    assert is_isomorphic(g, C.path_gadget(2, 3).gadget)
    side = json.loads((tmp_path / "p.json.predicted.json").read_text())
    assert sorted(side["transmit"]) == ["1/2", "1/3", "2/3"]
    assert sorted(side["reflect"]) == ["1/5", "2/5", "3/5", "4/5"]


def test_build_named(capsys):
    code, out, _ = run(capsys, "build", "approx_switch", "3")
    assert code == 0 and load_gadget(out).n_terminals == 4
    code, _, _ = run(capsys, "build", "approx_switch", "4")
    assert code == 1
    code, _, _ = run(capsys, "build", "nothing")
    assert code == 1


def test_classify(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(save_gadget(C.cycle_gadget(4).gadget))
    code, out, _ = run(capsys, "classify", "--gadget", str(p), "--grid", "4")
    doc = json.loads(out)
    assert code == 0 and doc["transmit"] == ["1/4", "3/4"] and doc["reflect"] == ["1/2"]


def test_reversal_and_switch(capsys):
    code, out, _ = run(capsys, "reversal", "cycle", "3")
    assert code == 0 and is_isomorphic(load_gadget(out), C.reversal(C.cycle_spec(3)))
    code, out, _ = run(capsys, "switch-from", "cycle", "3")
    assert code == 0 and is_isomorphic(load_gadget(out), C.cycle3_switch())
    code, _, _ = run(capsys, "switch-from", "cycle")
    assert code == 1


def test_switch_from_spec_file(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    g0 = json.loads(save_gadget(C.cycle_graph(3)))
    spec.write_text(json.dumps({"g0": g0, "attach": [0]}))
    code, out, _ = run(capsys, "switch-from", "--spec", str(spec))
    assert code == 0 and is_isomorphic(load_gadget(out), C.cycle3_switch())


def test_exact_check(capsys, tmp_path):
    p = tmp_path / "p22.json"
    p.write_text(save_gadget(C.path_gadget(2, 2).gadget))
    code, out, _ = run(capsys, "exact-check", "--gadget", str(p), "--witness")
    doc = json.loads(out)
    assert code == 0 and doc["conjugation"] == "confirmed"
    assert "sqrt2" in doc["witness"]["alpha"]
    assert doc["1/4"]["s_matrix"][1][0] == "(0+0*sqrt2)+i*(0+0*sqrt2)"


def test_approx_search(capsys, tmp_path):
    out = tmp_path / "m.csv"
    code, _, _ = run(capsys, "approx-search", "--max-m", "400", "--out", str(out))
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert code == 0 and len(rows) == 200
    rec = [int(r["m"]) for r in rows if r["is_record"] == "1"]
    assert 37 in rec and 379 in rec
    assert list(rows[0].keys()) == ["m", "error_spectral", "error_frobenius", "is_record"]


def test_approx_search_validate(capsys):
    code, out, _ = run(capsys, "approx-search", "--max-m", "41", "--records-only", "--validate")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["m"] for r in rows] == ["1", "27", "37"]
    assert all(float(r["graph_deviation"]) < 1e-8 for r in rows)


def test_simulate(capsys, tmp_path):
    g = tmp_path / "two.json"
    g.write_text(save_gadget(C.two_edge_path()))
    series, report = tmp_path / "s.csv", tmp_path / "r.json"
    code, _, _ = run(capsys, "simulate", "--gadget", str(g), "--k", "1/2", "--sigma", "10", "--L", "200",
                     "--out", str(series), "--report", str(report))
    rep = json.loads(report.read_text())
    assert code == 0 and rep["valid"] and abs(rep["arm_probabilities"][1] - 1) < 0.02
    rows = list(csv.reader(io.StringIO(series.read_text())))
    assert rows[0] == ["t", "p_arm1", "p_arm2", "norm"]


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    names = {e["name"] for e in json.loads(out)}
    assert code == 0 and {"cgw13_switch", "phase_gadget", "path(l1,l2)"} <= names


def test_idempotent_output(capsys, tmp_path, switch13):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "smatrix", "--gadget", switch13, "--k", "1/3", "--k", "2/7", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()
