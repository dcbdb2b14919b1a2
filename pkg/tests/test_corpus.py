import shutil

import pytest

from qmlang.corpus import (
    CORPUS_DIR,
    REFERENCE_F,
    TABLE1_FILES,
    Check,
    check_corpus,
    format_report,
    nearest_k,
    unit_scale_diagnostic,
)
from qmlang.qml import load, serialize


@pytest.fixture(scope="module")
def checks():
    return check_corpus()


def test_corpus_files_present():
    for name in list(REFERENCE_F) + list(TABLE1_FILES):
        assert (CORPUS_DIR / name).is_file()


def test_table2_and_table1_pass(checks):
    for c in checks:
        if c.table in ("I", "II"):
            assert c.passed, c


def test_table3_structure_checks_pass(checks):
    for c in checks:
        if c.kind in ("total-time", "mirror"):
            assert c.passed, c
            if c.kind == "total-time":
                assert c.detail == "k=90"


def test_report_format(checks):
    text = format_report(checks)
    assert text.splitlines()[-1].startswith("summary ")
    assert len(text.splitlines()) == len(checks) + 2


def test_perturbed_time_fails(tmp_path):
    corpus = tmp_path / "tables"
    shutil.copytree(CORPUS_DIR, corpus)
    path = corpus / "table2_swap.qml"
    cmd = load(path)
    letters = list(cmd.letters)
    letters[3] = type(letters[3])(letters[3].switches, letters[3].t + 1.0)
    path.write_text(serialize(type(cmd)(cmd.gate_name, cmd.dim, tuple(letters), cmd.energies), decimals=4))
    by_name = {c.name: c for c in check_corpus(corpus) if c.kind == "f_test"}
    assert not by_name["table2_swap.qml"].passed
    assert by_name["table2_cnot.qml"].passed


def test_missing_corpus(tmp_path):
    with pytest.raises(FileNotFoundError):
        check_corpus(tmp_path / "nothing")
    with pytest.raises(FileNotFoundError, match="missing"):
        check_corpus(tmp_path)


def test_nearest_k():
    k, rel = nearest_k(451.9278, 2.5019992006393608)
    assert k == 90 and rel < 5e-4


def test_unit_scale_diagnostic():
    rows = [Check("II", n, "f_test", 100 * r, r, False) for n, r in [("a", 1e-7), ("b", 2e-6), ("c", 1e-7)]]
    assert "unit-convention" in unit_scale_diagnostic(rows)
    rows[0] = Check("II", "a", "f_test", 1e-7, 1e-7, True)
    assert unit_scale_diagnostic(rows) is None
