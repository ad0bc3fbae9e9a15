import csv
import io
import json

import pytest

from tcg.enumeration import EquilibriumReport
from tcg.report import CSV_COLUMNS, emit_report, render_csv, render_json
from tcg.tree import loads


def test_count_pattern(catalogue):
    rows = list(csv.DictReader(io.StringIO(render_csv([catalogue[n] for n in range(4, 20)]))))
    assert [int(r["count"]) for r in rows] == [1] * 12 + [0, 1, 0, 2]
    assert tuple(rows[0]) == CSV_COLUMNS


def test_empty_row_has_blank_metrics():
    text = render_csv([EquilibriumReport(n=16, trees_scanned=634847)])
    row = text.splitlines()[1]
    assert row == "16,634847,0,,,,,,"


def test_files_are_deterministic(catalogue, tmp_path):
    reports = [catalogue[n] for n in (4, 9, 16)]
    a = emit_report(reports, tmp_path / "a")
    b = emit_report(reports, tmp_path / "b")
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_outputs_read_back(catalogue, tmp_path):
    written = emit_report([catalogue[4]], tmp_path, ["json", "dot"])
    names = sorted(p.name for p in written)
    assert names == ["equilibria.json", "n04_eq0.dot", "n04_eq0.json"]
    prof = loads((tmp_path / "n04_eq0.json").read_text())
    assert prof == catalogue[4].equilibria[0][1]
    dot = (tmp_path / "n04_eq0.dot").read_text()
    assert dot.count("->") == 4 and dot.count("label=") == 5
    data = json.loads((tmp_path / "equilibria.json").read_text())
    assert data["reports"][0]["equilibria"][0]["fairness_ratio"] == "2/1"
    assert "elapsed" not in json.dumps(data)


def test_json_marks_missing_equilibria():
    data = json.loads(render_json([EquilibriumReport(n=18, trees_scanned=4688676)]))
    assert data["reports"][0]["quality"]["status"] == "NoEquilibrium"


def test_bad_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], tmp_path, ["png"])


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError) as exc:
        emit_report([], blocker / "sub")
    assert "file" in str(exc.value)
