import json
import math

import numpy as np
import pytest

from wiltonmoments.cli import run, _to_json


def run_capture(argv, capsys):
    status = run(argv)
    out = capsys.readouterr().out
    return status, out


class TestEval:
    def test_a_at_one(self, capsys):
        status, out = run_capture(["eval", "--fn", "A", "--x", "1"], capsys)
        assert status == 0
        rows = json.loads(out)
        expect = math.log(2.0 * math.pi) - np.euler_gamma
        assert rows[0]["value"] == pytest.approx(expect, abs=1e-8)

    def test_phi2_csv(self, capsys):
        status, out = run_capture(
            ["--format", "csv", "eval", "--fn", "Phi2", "--x", "0.5"], capsys
        )
        assert status == 0
        lines = out.strip().split("\n")
        assert lines[0] == "function,x,value,est_error,method"
        assert float(lines[1].split(",")[2]) == pytest.approx(
            -math.pi**2 / 288.0, abs=1e-9
        )

    def test_grid(self, capsys):
        status, out = run_capture(
            ["eval", "--fn", "F", "--grid", "0.2:0.8:4"], capsys
        )
        assert status == 0
        assert len(json.loads(out)) == 4

    def test_missing_points_is_usage_error(self, capsys):
        assert run(["eval", "--fn", "A"]) == 2


class TestCF:
    def test_golden_json(self, capsys):
        golden = (math.sqrt(5.0) - 1.0) / 2.0
        status, out = run_capture(["cf", "--x", str(golden), "--depth", "4"], capsys)
        assert status == 0
        d = json.loads(out)
        assert d["partial_quotients"] == [1, 1, 1, 1]
        assert d["convergents"] == [[0, 1], [1, 1], [1, 2], [2, 3], [3, 5]]

    def test_json_roundtrip_identity(self, capsys):
        status, out = run_capture(["cf", "--x", "0.318309886183790", "--depth", "8"], capsys)
        parsed = json.loads(out)
        assert _to_json(parsed) + "\n" == out
        assert json.loads(_to_json(parsed)) == parsed


class TestWiltonCmd:
    def test_points_csv(self, capsys):
        status, out = run_capture(
            ["--format", "csv", "wilton", "--x", "0.6180339887498949"], capsys
        )
        assert status == 0
        lines = out.strip().split("\n")
        assert lines[0] == "point,value,terms_used,tail_bound"
        val = float(lines[1].split(",")[1])
        assert val == pytest.approx(0.2974052637, abs=1e-6)

    def test_sampled(self, capsys):
        status, out = run_capture(["--seed", "5", "wilton", "--sample", "10"], capsys)
        assert status == 0
        assert len(json.loads(out)) == 10


class TestMomentCmd:
    def test_byte_identical_reruns(self, capsys):
        argv = ["moment", "--k", "10", "--samples", "1000", "--seed", "7"]
        s1, out1 = run_capture(argv, capsys)
        s2, out2 = run_capture(argv, capsys)
        assert s1 == s2 == 0
        assert out1 == out2

    def test_csv_columns(self, capsys):
        status, out = run_capture(
            ["moment", "--k", "3", "--samples", "2000", "--seed", "1", "--out", "csv"],
            capsys,
        )
        assert status == 0
        header = out.strip().split("\n")[0]
        assert header == "K,value,std_error,gamma_ratio,target_ratio,rejections"

    def test_sweep(self, capsys):
        status, out = run_capture(
            ["moment", "--sweep", "2,4", "--samples", "2000", "--seed", "2"], capsys
        )
        assert status == 0
        assert len(json.loads(out)) == 2

    def test_needs_k(self, capsys):
        assert run(["moment", "--samples", "100"]) == 2


class TestCotangentCmd:
    def test_summary_json(self, capsys):
        status, out = run_capture(
            ["cotangent-dist", "--b", "101", "--a0", "0.5", "--a1", "1.0", "--kmax", "2"],
            capsys,
        )
        assert status == 0
        d = json.loads(out)
        assert d["b"] == 101
        assert len(d["normalized_moments"]) == 2

    def test_per_r_csv(self, tmp_path, capsys):
        per_r = tmp_path / "rows.csv"
        status, _ = run_capture(
            ["cotangent-dist", "--b", "11", "--per-r", str(per_r)], capsys
        )
        assert status == 0
        lines = per_r.read_text().strip().split("\n")
        assert lines[0] == "r,c0,c0_over_b"
        assert len(lines) == 1 + 5  # coprime r in [6, 10]


class TestVerifyCmd:
    def test_single_suite(self, capsys):
        status, out = run_capture(
            ["verify", "--suite", "functional-equation"], capsys
        )
        assert status == 0
        assert "PASS" in out

    def test_list(self, capsys):
        status, out = run_capture(["verify", "--list"], capsys)
        assert status == 0
        assert "gamma-ratio-trend" in out

    def test_unknown_flag_exits_2(self):
        assert run(["verify", "--bogus"]) == 2


class TestConfigPrecedence:
    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("WM_SEED", "99")
        _, out1 = run_capture(["wilton", "--sample", "3"], capsys)
        monkeypatch.delenv("WM_SEED")
        _, out2 = run_capture(["--seed", "99", "wilton", "--sample", "3"], capsys)
        assert out1 == out2

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("WM_SEED", "1")
        _, out1 = run_capture(["--seed", "2", "wilton", "--sample", "3"], capsys)
        monkeypatch.delenv("WM_SEED")
        _, out2 = run_capture(["--seed", "2", "wilton", "--sample", "3"], capsys)
        assert out1 == out2

    def test_output_file_lf(self, tmp_path, capsys):
        path = tmp_path / "out.json"
        status, _ = run_capture(
            ["--output", str(path), "eval", "--fn", "Phi2", "--x", "0.5"], capsys
        )
        assert status == 0
        raw = path.read_bytes()
        assert b"\r" not in raw


class TestJsonFormatting:
    def test_17_digits_roundtrip(self):
        vals = [math.pi, 1.0 / 3.0, 5e-324, 1e308, -0.0]
        text = _to_json({"v": list(vals)})
        parsed = json.loads(text)
        assert parsed["v"] == vals
