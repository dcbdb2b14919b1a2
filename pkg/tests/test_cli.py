import subprocess
import sys

import numpy as np
import pytest

from qmlang.cli import load_matrix, main
from qmlang.corpus import CORPUS_DIR
from qmlang.gates import library

CNOT_FILE = str(CORPUS_DIR / "table2_cnot.qml")


def report(text):
    return dict(line.split(" ", 1) for line in text.strip().splitlines())


def test_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "qmlang", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for sub in ("compile", "run", "verify", "closure", "tables"):
        assert sub in res.stdout


def test_compile_cnot(tmp_path, capsys):
    out = tmp_path / "cnot.qml"
    assert main(["compile", "--gate", "cnot", "--seed", "7", "--out", str(out)]) == 0
    rep = report(capsys.readouterr().out)
    assert float(rep["f_test"]) <= 1e-8
    assert rep["energies"] == "2.5 0.1 0.1"
    assert (tmp_path / "cnot.qml.report").read_text().startswith("gate cnot")
    assert main(["verify", str(out), "--threshold", "1e-8"]) == 0


def test_compile_phshift(tmp_path, capsys):
    out = tmp_path / "p.qml"
    assert main(["compile", "--gate", "phshift", "--phi", "1.5707963", "--out", str(out)]) == 0
    assert "phshift(1.5707963)" in out.read_text()


def test_compile_embedded_with_overrides(tmp_path, capsys):
    out = tmp_path / "e.qml"
    assert main(["compile", "--gate", "had-kron-i", "--k", "40", "--out", str(out), "--ej", "0.12"]) == 0
    rep = report(capsys.readouterr().out)
    assert rep["k"] == "40" and rep["energies"] == "2.5 0.12 0.1"
    assert "energies 2.5 0.12 0.1" in out.read_text()


def test_compile_non_convergence_writes_best(tmp_path, capsys):
    out = tmp_path / "n.qml"
    code = main(["compile", "--gate", "i-kron-not", "--k", "1", "--restarts", "4", "--out", str(out)])
    assert code == 2
    assert out.exists()
    assert "larger k" in capsys.readouterr().out


def test_compile_unknown_gate(capsys):
    assert main(["compile", "--gate", "nosuchgate"]) == 1
    assert "unknown gate" in capsys.readouterr().err


def test_compile_raw_matrix(tmp_path, capsys):
    m = library("had").matrix
    path = tmp_path / "had.txt"
    rows = [" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row) for row in m]
    path.write_text("dim 2\n" + "\n".join(rows) + "\n")
    assert np.allclose(load_matrix(path), m)
    assert main(["compile", "--matrix", str(path), "--out", str(tmp_path / "raw.qml")]) == 0
    path.write_text("dim 2\n1 0 1 0\n0 0 1 0\n")
    assert main(["compile", "--matrix", str(path), "--out", str(tmp_path / "bad.qml")]) == 1
    assert "not unitary" in capsys.readouterr().err


def test_run_cnot_golden(capsys):
    assert main(["run", CNOT_FILE]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    u = np.array([[complex(tok) for tok in line.split()] for line in lines])
    expected = np.exp(1j * np.pi / 4) * np.eye(4)[[0, 1, 3, 2]]
    assert np.max(np.abs(u - expected)) <= 2e-3


def test_run_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.qml"
    path.write_text("gate empty\ndim 2\n")
    assert main(["run", str(path)]) == 0
    out = capsys.readouterr()
    assert "no letters" in out.err
    assert out.out.split()[0] == "+1.000000000e+00+0.000000000e+00j"


def test_run_malformed(tmp_path, capsys):
    path = tmp_path / "bad.qml"
    path.write_text("gate x\ndim 4\nletter 1 1 0\n")
    assert main(["run", str(path)]) == 1
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("name, gate, expected", [
    ("table2_cnot.qml", None, "2.9e-06"),
    ("table2_swap.qml", None, "9.5e-08"),
])
def test_verify_golden(name, gate, expected, capsys):
    assert main(["verify", str(CORPUS_DIR / name)]) == 0
    rep = report(capsys.readouterr().out)
    assert rep["f_test"] == expected and rep["result"] == "pass"


def test_verify_cross_gate(capsys):
    assert main(["verify", CNOT_FILE, "--gate", "swap"]) == 2
    assert float(report(capsys.readouterr().out)["f_test"]) > 1


def test_closure(capsys):
    assert main(["closure"]) == 0
    out = capsys.readouterr().out
    assert "closure device generators 4 dimension 15" in out
    assert "closure su8 generators 5 dimension 63" in out
    assert "failed" not in out


def test_tables(capsys, tmp_path):
    code = main(["tables"])
    out = capsys.readouterr().out
    assert out.count("FAIL") == 2 and code == 2
    assert main(["tables", "--corpus", str(tmp_path / "none")]) == 1


def test_usage_error_is_input_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
