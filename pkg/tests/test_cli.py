import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from helpers import exact_result
from ellipsf.cli import BadArguments, RunConfig, dumps, main, parse_nonstat, parse_poly
from ellipsf.polyops import MultiPoly
from ellipsf.ratcore import I


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_quincunx(capsys):
    code, out, _ = run(capsys, "analyze", "--matrix", "1,1;1,-1")
    data = json.loads(out)
    assert code == 0
    assert data["q"] == 2 and data["Q2"] == [["1", "0"], ["0", "1"]]
    assert data["isotropic"] and data["invariance_report"]["ok"] and data["partition"]["ok"]
    assert data["coset_reps"] == [["0", "0"], ["1/2", "1/2"]]


def test_analyze_second(capsys):
    code, out, _ = run(capsys, "analyze", "--matrix", "1,-2;1,0")
    Q2 = [[float(eval(x)) for x in r] for r in json.loads(out)["Q2"]]
    assert code == 0
    assert np.allclose(np.array(Q2) / Q2[0][0], [[1, 0.25], [0.25, 0.5]])


def test_not_isotropic_exit(capsys):
    code, out, err = run(capsys, "analyze", "--matrix", "2,0;0,3")
    assert code == 2 and out == "" and "isotropic" in err


def test_mask_default(capsys):
    code, out, _ = run(capsys, "mask")
    data = json.loads(out)
    assert code == 0 and data["mask_text"] == "1/2 + 1/4*cos(xi2) + 1/4*cos(xi1)"
    assert data["mask_at_zero"] == "1"


def test_mask_higher(capsys):
    _, out, _ = run(capsys, "mask", "--higher", "6")
    assert json.loads(out)["mask_text"] == "15/32 + 1/4*cos(xi2) + 1/4*cos(xi1) + 1/64*cos(2*xi2) + 1/64*cos(2*xi1)"


def test_mask_nonstationary(capsys):
    _, out, _ = run(capsys, "mask", "--nonstat", "X=2i*x1", "--scale", "0")
    assert json.loads(out)["mask_text"] == "1/2 + 1/4*cos(xi2) + 1/4*cos(xi1) + -1/4i*sin(xi1)"


def test_space_quincunx(capsys):
    code, out, _ = run(capsys, "space", "--matrix", "1,1;1,-1")
    data = json.loads(out)
    res = exact_result("quincunx")
    assert code == 0
    assert data["order"] == res.order and data["space"]["dim"] == res.space.dim
    assert data["space_text"] == [p.to_str() for p in res.space.basis]
    assert data["scale_invariant"] is True
    assert data["route_agreement"]["agree"]


def test_space_nonstationary(capsys):
    _, out, _ = run(capsys, "space", "--nonstat", "X=2i*x1")
    data = json.loads(out)
    assert data["space_text"][:3] == ["1", "y", "y^2+x"]
    assert data["space_text"] == [p.to_str() for p in exact_result("nonstat_quincunx").space.basis]
    assert data["scale_invariant"] is False
    assert data["affine_subspace_text"] == ["1", "y"]


def test_cascade_csv(capsys, tmp_path):
    target = tmp_path / "grid.csv"
    code, out, _ = run(capsys, "cascade", "--levels", "8", "--box", "-6:6", "--out", str(target))
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert rows[0] == ["x1", "x2", "value"]
    pts = np.array([[float(x) for x in r] for r in rows[1:]])
    assert np.all(np.abs(pts[:, :2]) <= 6)
    # A^8 = 16 I, so the grid is (Z/16)^2 and the box holds whole cosets of Z^2
    key = np.round(np.mod(pts[:, :2], 1) * 16).astype(int) % 16
    sums = {}
    for k, v in zip(map(tuple, key), pts[:, 2]):
        sums[k] = sums.get(k, 0.0) + v
    assert max(abs(s - 1) for s in sums.values()) < 1e-6


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--levels", "6")
    data = json.loads(out)
    assert code == 0 and data["annihilation_max"] < 1e-8
    assert data["partition_of_unity_error"] < 1e-6 and data["refinement_residual"] < 1e-6


def test_deterministic_output(capsys):
    first = run(capsys, "space", "--matrix", "1,-2;1,0")[1]
    second = run(capsys, "space", "--matrix", "1,-2;1,0")[1]
    assert first == second


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["analyze", "--matrix", "1,2;3"],
    ["mask", "--higher", "5"],
    ["mask", "--nonstat", "cos:1"],
    ["cascade", "--box", "3:1"],
    ["space", "--order", "0"],
])
def test_bad_arguments(capsys, argv):
    assert run(capsys, *argv)[0] == 5


def test_construction_error(capsys):
    code, _, err = run(capsys, "space", "--matrix", "1,-2;1,0", "--nonstat", "X=2i*x1")
    assert code == 3 and "UnsupportedGroupOrder" in err


def test_parsers():
    assert parse_poly("2i*x1", 2) == MultiPoly(2, {(1, 0): 2 * I})
    assert parse_poly("i*x^3+i*y^3", 2) == MultiPoly(2, {(3, 0): I, (0, 3): I})
    assert parse_poly("-3/4*x1^2*x2 + 1", 2) == MultiPoly(2, {(2, 1): -0.75, (0, 0): 1})
    kind, kw = parse_nonstat("sum:1=1,2=1/2", 2)
    assert kind == "sum_of_powers" and kw["C"] == {1: 1, 2: 0.5}
    with pytest.raises(BadArguments):
        parse_poly("x3", 2)
    with pytest.raises(BadArguments):
        RunConfig(command="mask", matrix=((1, 1), (1, -1)), tol=0)


def test_dumps_format():
    assert dumps({"a": 0.1, "b": [1, 2]}) == '{\n  "a": 0.10000000000000001,\n  "b": [1, 2]\n}\n'


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ellipsf", "analyze", "--matrix", "2,0;0,2"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["q"] == 4
