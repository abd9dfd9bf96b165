"""Experiment reports and their CSV / JSON serialization.

Files are written to a temporary name in the target directory and renamed
into place, so a reader never sees a half-written report.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field


def _clean(v):
    """JSON-safe scalar: numpy types unwrapped, non-finite floats as strings."""
    if hasattr(v, "item") and not isinstance(v, (list, dict)):
        try:
            v = v.item()
        except (ValueError, AttributeError):
            pass
    if isinstance(v, complex):
        return {"real": _clean(v.real), "imag": _clean(v.imag)}
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class Flag:
    """A pass/fail check that can be recomputed from its own fields.

    ``kind`` is one of "le" (value <= tolerance), "ge" (value >= tolerance),
    "abs_le" (|value| <= tolerance) or "true" (value is truthy).
    """

    name: str
    value: object
    tolerance: object = None
    kind: str = "le"

    @property
    def passed(self):
        v, t = self.value, self.tolerance
        if self.kind == "true":
            return bool(v)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            return False
        if self.kind == "le":
            return v <= t
        if self.kind == "ge":
            return v >= t
        if self.kind == "abs_le":
            return abs(v) <= t
        raise ValueError(f"unknown flag kind {self.kind!r}")

    def as_row(self):
        return {"check": self.name, "value": self.value, "tolerance": self.tolerance,
                "kind": self.kind, "passed": self.passed}


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    elapsed: float = 0.0
    notes: list = field(default_factory=list)

    def flag(self, name, value, tolerance=None, kind="le"):
        f = Flag(name, _clean(value), _clean(tolerance), kind)
        self.flags.append(f)
        return f

    @property
    def passed(self):
        return all(f.passed for f in self.flags)

    def summary(self):
        return _clean({
            "experiment": self.experiment,
            "inputs": self.inputs,
            "fits": self.fits,
            "flags": [f.as_row() for f in self.flags],
            "passed": self.passed,
            "elapsed_seconds": round(self.elapsed, 3),
            "notes": self.notes,
        })

    def csv_text(self):
        """Result rows (record=data) followed by one row per check (record=check).

        Check rows carry value, tolerance, kind and passed, so the verdict can
        be recomputed from the CSV alone.
        """
        rows = [dict(record="data", **r) for r in self.rows]
        rows += [dict(record="check", **f.as_row()) for f in self.flags]
        if not rows:
            return ""
        cols = []
        for r in rows:
            cols.extend(k for k in r if k not in cols)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in cols})
        return buf.getvalue()

    def write(self, out_dir):
        """Write ``<experiment>.csv`` and ``<experiment>.json``; returns both paths."""
        os.makedirs(out_dir, exist_ok=True)
        csv_path = os.path.join(out_dir, f"{self.experiment}.csv")
        json_path = os.path.join(out_dir, f"{self.experiment}.json")
        atomic_write(csv_path, self.csv_text())
        atomic_write(json_path, json.dumps(self.summary(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path


def _fmt(v):
    v = _clean(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return v


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
