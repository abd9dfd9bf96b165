import csv
import io
import json
import math

from fvanish.reports import ExperimentReport, Flag, atomic_write


def test_flag_kinds():
    assert Flag("a", 0.5, 1.0, "le").passed
    assert not Flag("a", 1.5, 1.0, "le").passed
    assert Flag("a", -0.5, 1.0, "abs_le").passed
    assert Flag("a", 2.0, 1.0, "ge").passed
    assert not Flag("a", float("nan"), 1.0, "le").passed
    assert Flag("a", True, True, "true").passed


def test_csv_rows_recompute_the_verdict(tmp_path):
    rep = ExperimentReport("demo", inputs={"x": 1})
    rep.rows.append({"n": 1, "value_col": 0.25})
    rep.flag("small", 0.25, 0.5)
    rep.flag("big", 2.0, 1.0, "ge")
    csv_path, json_path = rep.write(tmp_path)
    rows = list(csv.DictReader(open(csv_path)))
    checks = [r for r in rows if r["record"] == "check"]
    for r in checks:
        v, t = float(r["value"]), float(r["tolerance"])
        ok = v <= t if r["kind"] == "le" else v >= t
        assert ok == (r["passed"] == "True")
    summary = json.load(open(json_path))
    assert summary["passed"] is True and summary["inputs"] == {"x": 1}


def test_non_finite_values_serialize(tmp_path):
    rep = ExperimentReport("inf")
    rep.fits["tail"] = float("inf")
    rep.write(tmp_path)
    assert json.load(open(tmp_path / "inf.json"))["fits"]["tail"] == "inf"


def test_atomic_write_leaves_no_temp_files(tmp_path):
    p = tmp_path / "out.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [f.name for f in tmp_path.iterdir()] == ["out.txt"]
