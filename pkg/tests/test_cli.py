"""CLI surface: subcommands, formats, exit codes, reproducibility."""

import json

import numpy as np
import pytest

from qcorrkit.cli import run
from qcorrkit.correlation import Correlation
from qcorrkit.separating import TruncationSpec, ideal_truncated_strategy
from qcorrkit.strategy import Strategy, induce


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTables:
    def test_printed_pair_json(self, capsys):
        code, out, _ = run_capture(capsys, ["tables", "--alpha", "0.5", "--pair", "0", "4"])
        assert code == 0
        payload = json.loads(out)
        assert payload["entries"] == [[0.8, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.0]]

    def test_exact_source(self, capsys):
        code, out, _ = run_capture(
            capsys, ["tables", "--alpha", "0.5", "--pair", "2", "4", "--source", "exact"]
        )
        assert code == 0
        entries = np.asarray(json.loads(out)["entries"])
        np.testing.assert_allclose(
            entries, [[0.05, 0, 0], [0, 0.2, 0], [0.75, 0, 0]], atol=1e-12
        )

    def test_full_correlation(self, capsys):
        code, out, _ = run_capture(capsys, ["tables", "--alpha", "0.5"])
        assert code == 0
        corr = Correlation.from_dict(json.loads(out)["correlation"])
        assert corr.shape == (4, 5, 3, 3)

    def test_csv_format(self, capsys):
        code, out, _ = run_capture(
            capsys, ["tables", "--alpha", "0.5", "--pair", "0", "4", "--format", "csv"]
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "a,b,p"
        assert len(lines) == 10


class TestStrategyPipeline:
    def test_truncate_then_induce(self, capsys, tmp_path):
        path = tmp_path / "strategy.json"
        code = run(["truncate", "--alpha", "0.5", "--m", "3", "--out", str(path)])
        assert code == 0
        capsys.readouterr()
        loaded = Strategy.from_json(path.read_text())
        assert loaded.dA == 6

        code, out, _ = run_capture(capsys, ["induce", "--strategy", str(path)])
        assert code == 0
        corr = Correlation.from_json(out, norm_tol=1e-10)
        expected = induce(ideal_truncated_strategy(TruncationSpec(alpha=0.5, m=3)))
        np.testing.assert_allclose(corr.table, expected.table, atol=1e-12)

    def test_distance_between_files(self, capsys, tmp_path):
        p_path = tmp_path / "p.json"
        q_path = tmp_path / "q.json"
        table = np.zeros((1, 1, 2, 2))
        table[0, 0, 0, 0] = 1.0
        p_path.write_text(Correlation(table).to_json())
        table2 = np.zeros((1, 1, 2, 2))
        table2[0, 0, 1, 1] = 1.0
        q_path.write_text(Correlation(table2).to_json())
        code, out, _ = run_capture(
            capsys,
            ["distance", "--p", str(p_path), "--q", str(q_path), "--metric", "max_tv"],
        )
        assert code == 0
        assert json.loads(out)["value"] == 1.0

    def test_truncation_distance_default(self, capsys):
        code, out, _ = run_capture(
            capsys, ["distance", "--alpha", "0.5", "--m", "4", "--metric", "max_tv"]
        )
        assert code == 0
        assert 0 < json.loads(out)["value"] <= 4 * 0.5**16

    def test_schmidt_command(self, capsys):
        code, out, _ = run_capture(capsys, ["schmidt", "--alpha", "0.5", "--m", "2"])
        assert code == 0
        coeffs = json.loads(out)["coefficients"]
        assert len(coeffs) == 4
        assert coeffs[0] == pytest.approx(0.8677218312746246, abs=1e-12)


class TestVerifiers:
    def test_y4_passes_on_reference(self, capsys):
        code, out, _ = run_capture(capsys, ["y4", "--alpha", "0.5", "--m", "4"])
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_blocks_reports_weights(self, capsys):
        code, out, _ = run_capture(capsys, ["blocks", "--alpha", "0.5", "--m", "6"])
        assert code == 0
        payload = json.loads(out)
        np.testing.assert_allclose(payload["weights"], [0.25, 0.75], atol=1e-6)

    def test_chain_csv_rows(self, capsys):
        code, out, _ = run_capture(
            capsys, ["chain", "--alpha", "0.5", "--m-min", "2", "--m-max", "6"]
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "m,max_chain_length"
        assert lines[1:] == ["2,4", "3,6", "4,8", "5,10", "6,12"]

    def test_verify_reference_passes(self, capsys):
        code, out, _ = run_capture(capsys, ["verify", "--alpha", "0.5", "--m", "4"])
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert all(check["pass"] for check in payload["checks"])

    def test_verify_rejects_broken_strategy_file(self, capsys, tmp_path):
        s = ideal_truncated_strategy(TruncationSpec(alpha=0.5, m=2))
        broken = Strategy(s.dA, s.dB, 1.05 * s.state, s.alice_meas, s.bob_meas)
        path = tmp_path / "broken.json"
        path.write_text(broken.to_json())
        code, out, err = run_capture(capsys, ["verify", "--strategy", str(path)])
        assert code == 2
        assert "state_norm" in err

    def test_verify_accepts_valid_strategy_file(self, capsys, tmp_path):
        s = ideal_truncated_strategy(TruncationSpec(alpha=0.5, m=2))
        path = tmp_path / "ok.json"
        path.write_text(s.to_json())
        code, _, _ = run_capture(capsys, ["verify", "--strategy", str(path)])
        assert code == 0

    def test_y4_fails_on_corrupted_file(self, capsys, tmp_path):
        s = ideal_truncated_strategy(TruncationSpec(alpha=0.5, m=2))
        bob = [list(q) for q in s.bob_meas]
        bob[4] = list(s.bob_meas[1])
        broken = Strategy(s.dA, s.dB, s.state, s.alice_meas, bob)
        path = tmp_path / "wrong_q4.json"
        path.write_text(broken.to_json())
        code, _, err = run_capture(capsys, ["y4", "--strategy", str(path)])
        assert code == 2
        assert "residual" in err


class TestSeesawCommand:
    def test_small_run_with_trace(self, capsys, tmp_path):
        trace_path = tmp_path / "trace.csv"
        code, out, _ = run_capture(
            capsys,
            [
                "seesaw", "--target", "chsh", "--dim", "1", "--restarts", "2",
                "--iters", "4", "--seed", "9", "--trace-out", str(trace_path),
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["distance"] > 0
        lines = trace_path.read_text().strip().split("\n")
        assert lines[0] == "restart,iter,objective"


class TestCliContract:
    def test_usage_error_exit_code(self, capsys):
        assert run(["no-such-command"]) == 1
        capsys.readouterr()
        assert run(["tables", "--alpha", "not-a-number"]) == 1
        capsys.readouterr()
        assert run(["distance", "--p", "only-one.json"]) == 1
        capsys.readouterr()

    def test_byte_reproducible_json(self, capsys):
        _, out1, _ = run_capture(capsys, ["tables", "--alpha", "0.5", "--pair", "2", "4"])
        _, out2, _ = run_capture(capsys, ["tables", "--alpha", "0.5", "--pair", "2", "4"])
        assert out1 == out2
        _, s1, _ = run_capture(
            capsys,
            ["seesaw", "--target", "chsh", "--dim", "1", "--restarts", "2", "--iters", "3", "--seed", "4"],
        )
        _, s2, _ = run_capture(
            capsys,
            ["seesaw", "--target", "chsh", "--dim", "1", "--restarts", "2", "--iters", "3", "--seed", "4"],
        )
        assert s1 == s2

    def test_out_writes_file(self, capsys, tmp_path):
        path = tmp_path / "out.json"
        code = run(["tables", "--alpha", "0.5", "--pair", "0", "4", "--out", str(path)])
        assert code == 0
        capsys.readouterr()
        assert json.loads(path.read_text())["x"] == 0
