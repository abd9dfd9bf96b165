import json

import numpy as np
import pytest
import scipy.fft

from fvanish import cli, experiments, fields


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_decay_passes(tmp_path):
    cfg = write(tmp_path, {"experiment": "decay", "surface": {"kind": "circle", "node_count": 2048}})
    assert cli.main(["decay", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "decay.json").read_text())
    assert abs(summary["fits"]["envelope"]["exponent"] + 0.5) < 0.05


def test_tails_q4_is_marginal(tmp_path):
    cfg = write(tmp_path, {"experiment": "tails", "exponents": {"q": [4]}})
    assert cli.main(["tails", "--config", cfg, "--out", str(tmp_path)]) == 0
    s = json.loads((tmp_path / "tails.json").read_text())
    assert s["fits"]["q=4"]["classification"] == "marginal"


def test_schema_violation_exits_1(tmp_path, capsys):
    cfg = write(tmp_path, {"experiment": "tails", "exponents": {"q": [1.5]}})
    assert cli.main(["tails", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "exponents/q/0" in capsys.readouterr().err


def test_unknown_keys_rejected():
    with pytest.raises(experiments.ConfigError, match="unexpected"):
        experiments.validate({"experiment": "solve", "params": {"symbol": "helmholtz", "colour": 1}})


def test_mismatched_experiment_exits_1(tmp_path):
    cfg = write(tmp_path, {"experiment": "solve"})
    assert cli.main(["decay", "--config", cfg]) == 1


def test_failed_flag_exits_2(tmp_path):
    cfg = write(tmp_path, {"experiment": "decay", "thresholds": {"expected_exponent": -1.0}})
    assert cli.main(["decay", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_module_error_exits_1(tmp_path, capsys):
    cfg = write(tmp_path, {"experiment": "decay", "params": {"r_min": 10, "r_max": 20}})
    assert cli.main(["decay", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "decay failed" in capsys.readouterr().err


def test_output_is_deterministic(tmp_path):
    cfg = write(tmp_path, {"experiment": "autoconv", "seed": 9, "params": {"bump_count": 2, "N_list": [8, 16]}})
    for d in ("a", "b"):
        assert cli.main(["autoconv", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "autoconv.csv").read_bytes() == (tmp_path / "b" / "autoconv.csv").read_bytes()


def test_threads_flag_sets_env(tmp_path, monkeypatch):
    monkeypatch.delenv("FV_THREADS", raising=False)
    cfg = write(tmp_path, {"experiment": "solve"})
    assert cli.main(["solve", "--config", cfg, "--out", str(tmp_path), "--threads", "2"]) == 0
    assert fields.fft_workers() == 2


def test_accept_only_one_criterion(tmp_path, capsys):
    assert cli.main(["accept", "--only", "transform", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 1 and "accept_transform" in out


def test_accept_rejects_unknown_id(tmp_path):
    assert cli.main(["accept", "--only", "nope", "--out", str(tmp_path)]) == 1


class _FlippedFFT:
    """scipy.fft with the forward phase sign flipped."""

    def __getattr__(self, name):
        return getattr(scipy.fft, name)

    @staticmethod
    def fftn(x, axes=None, workers=None):
        n = np.prod([x.shape[a] for a in axes])
        return scipy.fft.ifftn(x, axes=axes, workers=workers) * n


def test_sign_mutation_fails_acceptance(tmp_path, monkeypatch):
    monkeypatch.setattr(fields, "sfft", _FlippedFFT())
    assert cli.main(["accept", "--only", "transform", "--out", str(tmp_path)]) == 2
    s = json.loads((tmp_path / "accept_transform.json").read_text())
    failed = {f["check"] for f in s["flags"] if not f["passed"]}
    assert "d1_modulation_sign" in failed
