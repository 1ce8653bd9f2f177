"""Command-line interface: schemas, determinism, exit codes, file formats."""

import json

import numpy as np
import pytest

from pfrkit.cli import main
from pfrkit.funcspace import DenseFunction, save_table
from pfrkit.gf2 import BitMatrix, BitVector
from pfrkit.quadratic import QuadraticPolynomial
from pfrkit.rng import RngStream


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_qgl_json_schema_and_determinism(capsys):
    args = ("qgl", "--gen", "quadratic:n=6,seed=2", "--eps", "0.25", "--seed", "4", "--json")
    code1, d1 = run(capsys, *args)
    code2, d2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert d1["schema"] == 1
    d1.pop("wall_ms")
    d2.pop("wall_ms")
    assert d1 == d2
    assert set(d1["polynomial"]) == {"n", "Q", "c", "b0"}


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code = main([
        "qgl", "--gen", "quadratic:n=6,seed=2", "--eps", "0.25",
        "--seed", "4", "--out", str(path),
    ])
    assert code == 0
    data = json.loads(path.read_text())
    assert data["command"] == "qgl" and data["schema"] == 1


def test_missing_input_exit_code(capsys):
    assert main(["qgl", "--eps", "0.2"]) == 2
    assert main(["qgl", "--fn", "/nonexistent", "--eps", "0.2"]) == 2


def test_unbounded_table_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("0,2.0,0.0\n1,0.0,0.0\n")
    assert main(["qgl", "--fn", str(path), "--eps", "0.2"]) == 4


def test_dense_cap_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("PFRKIT_DENSE_CAP", "4")
    assert main(["oracle", "u3", "--gen", "quadratic:n=8,seed=1"]) == 5


def test_homtest_roundtrip(tmp_path, capsys):
    rng = RngStream(31)
    m = n = 5
    mat = BitMatrix.random(n, m, rng.child("m"))
    v = BitVector.random(n, rng.child("v"))
    path = tmp_path / "map.txt"
    lines = ["# planted"]
    for x in range(1 << m):
        y = mat.apply(BitVector(m, x)) ^ v
        lines.append(f"{BitVector(m, x).to_string()},{y.to_string()}")
    path.write_text("\n".join(lines) + "\n")
    code, data = run(capsys, "homtest", "--map", str(path), "--seed", "6", "--json")
    assert code == 0
    assert data["agreement"] == 1.0
    assert data["M_rows"] == [BitVector(m, r).to_string() for r in mat.rows]
    assert data["v"] == v.to_string()


def test_homtest_partial_map_rejected(tmp_path, capsys):
    path = tmp_path / "part.txt"
    path.write_text("00,11\n01,10\n")
    assert main(["homtest", "--map", str(path), "--seed", "1"]) == 2


def test_oracle_maxquad_table(tmp_path, capsys):
    q = QuadraticPolynomial.random(5, RngStream(3))
    pts = np.arange(32, dtype=np.uint64)
    save_table(DenseFunction(5, q.phase_values(pts).astype(np.complex128)), tmp_path / "f.csv")
    code, data = run(capsys, "oracle", "maxquad", "--fn", str(tmp_path / "f.csv"), "--json")
    assert code == 0
    assert abs(data["max_correlation"] - 1.0) < 1e-9


def test_oracle_sumset_gen(capsys):
    code, data = run(
        capsys, "oracle", "sumset", "--gen", "cosets:n=10,dim=5,count=1,seed=2", "--json"
    )
    assert code == 0
    assert data["doubling_constant"] == 1.0


def test_oracle_lagrangian_census(capsys):
    code, data = run(capsys, "oracle", "lagrangians", "--n", "2", "--json")
    assert code == 0 and data["count"] == 15


def test_set_file_input(tmp_path, capsys):
    path = tmp_path / "set.txt"
    path.write_text("# a subspace\n0000\n0001\n0010\n0011\n")
    code, data = run(capsys, "oracle", "sumset", "--set", str(path), "--json")
    assert code == 0
    assert data["size"] == 4 and data["doubling_constant"] == 1.0


def test_bad_preset_rejected(capsys):
    with pytest.raises(SystemExit):
        main(["qgl", "--gen", "quadratic:n=4,seed=1", "--eps", "0.2", "--preset", "quick"])
