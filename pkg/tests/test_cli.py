"""CLI contract: subcommands, formats, determinism, exit codes."""

import json

import pytest

from dibc.cli import (
    EXIT_CHECK_FAILED,
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_USAGE,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_runtime(obj):
    if isinstance(obj, dict):
        return {k: strip_runtime(v) for k, v in obj.items() if k != "runtime_ms"}
    if isinstance(obj, list):
        return [strip_runtime(v) for v in obj]
    return obj


class TestBcRun:
    def test_noiseless_accepts_everything(self, capsys):
        code, out, _ = run_cli(
            capsys, "bc-run", "--trials", "2000", "--seed", "7", "--format", "json"
        )
        assert code == EXIT_OK
        report = json.loads(out)
        accept = next(r for r in report["results"] if r["name"] == "accept-rate")
        assert accept["value"] == 1.0
        assert report["checks"][0]["pass"] is True

    def test_fully_noisy_accepts_about_half(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "bc-run", "--trials", "20000", "--seed", "7", "--noise", "0.5",
            "--format", "json",
        )
        assert code == EXIT_OK
        report = json.loads(out)
        accept = next(r for r in report["results"] if r["name"] == "accept-rate")
        assert abs(accept["value"] - 0.5) < 0.02

    def test_bad_noise_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "bc-run", "--noise", "0.7")
        assert code == EXIT_USAGE
        assert "noise" in err

    def test_json_deterministic_modulo_runtime(self, capsys):
        args = ("bc-run", "--trials", "500", "--seed", "3", "--format", "json")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert strip_runtime(json.loads(out1)) == strip_runtime(json.loads(out2))


class TestCheat:
    @pytest.mark.parametrize(
        "party,strategy,expected",
        [("alice", "ghz-optimal", 0.853553), ("bob", "ghz-optimal", 0.75),
         ("alice", "honest-as-cheat", 0.75)],
    )
    def test_exact_values(self, capsys, party, strategy, expected):
        code, out, _ = run_cli(
            capsys, "cheat", party, strategy, "--trials", "20000", "--format", "json"
        )
        assert code == EXIT_OK
        report = json.loads(out)
        exact = next(r for r in report["results"] if r["name"] == "exact")
        assert abs(exact["value"] - expected) < 1e-6
        assert all(c["pass"] for c in report["checks"])

    def test_unknown_strategy_lists_registry(self, capsys):
        code, _, err = run_cli(capsys, "cheat", "alice", "who")
        assert code == EXIT_USAGE
        assert "ghz-optimal" in err and "honest-as-cheat" in err

    def test_unknown_party_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "cheat", "eve", "ghz-optimal")
        assert code == EXIT_USAGE


class TestBounds:
    def test_all_bounds_pass(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--which", "all", "--format", "json")
        assert code == EXIT_OK
        report = json.loads(out)
        values = {r["quantity"]: r["value"] for r in report["results"]}
        assert values["classical-ghz"] == 0.75
        assert values["bob-gain"] == 0.75
        assert values["pr-control"] == 1.0
        assert abs(values["alice-control"] - 0.8535533905932737) < 1e-6
        assert all(c["pass"] for c in report["checks"])

    def test_single_bound_csv(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--which", "classical-ghz", "--format", "csv")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "quantity,value,method,tolerance,runtime_ms"
        assert lines[1].startswith("classical-ghz,0.75,")

    def test_unreachable_tolerance_fails_check(self, capsys):
        code, _, _ = run_cli(
            capsys, "bounds", "--which", "chsh", "--tolerance", "1e-300", "--format", "json"
        )
        assert code == EXIT_CHECK_FAILED


class TestCoinflip:
    def test_honest_never_aborts(self, capsys):
        code, out, _ = run_cli(
            capsys, "coinflip", "--trials", "5000", "--seed", "5", "--format", "json"
        )
        assert code == EXIT_OK
        report = json.loads(out)
        row = report["results"][0]
        assert row["abort_rate"] == 0.0
        assert abs(row["p0"] - 0.5) < 0.03


class TestBiasTable:
    def test_published_rows(self, capsys):
        code, out, _ = run_cli(capsys, "bias-table", "--reps", "50", "--format", "json")
        assert code == EXIT_OK
        rows = json.loads(out)["results"]
        assert abs(rows[0]["alice_bound"] - 0.8536) < 5e-5
        assert rows[0]["bob_bound"] == 0.75
        assert abs(rows[0]["max_bias"] - 0.3536) < 5e-5
        assert abs(rows[1]["alice_bound"] - 0.8384) < 5e-4
        assert abs(rows[1]["bob_bound"] - 0.8277) < 5e-4
        assert abs(rows[49]["max_bias"] - 0.3366) < 1e-4

    def test_csv_has_header(self, capsys):
        code, out, _ = run_cli(capsys, "bias-table", "--reps", "2", "--format", "csv")
        assert code == EXIT_OK
        assert out.splitlines()[0] == "alice_bound,bob_bound,max_bias,n"

    def test_zero_reps_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "bias-table", "--reps", "0")
        assert code == EXIT_USAGE


class TestTableImportExport:
    def test_round_trip_through_files(self, capsys, tmp_path):
        exported = tmp_path / "table.json"
        code, _, _ = run_cli(
            capsys,
            "bc-run", "--trials", "500", "--seed", "2", "--noise", "0.01",
            "--export-table", str(exported), "--format", "json",
        )
        assert code == EXIT_OK
        data = json.loads(exported.read_text())
        assert data["parties"] == 3

        code, out, _ = run_cli(
            capsys,
            "bc-run", "--trials", "20000", "--seed", "2", "--table", str(exported),
            "--format", "json",
        )
        assert code == EXIT_OK
        accept = next(
            r for r in json.loads(out)["results"] if r["name"] == "accept-rate"
        )
        expected = 0.99**3 + 3 * 0.01**2 * 0.99
        assert abs(accept["value"] - expected) < 0.01

    def test_signaling_table_rejected_at_load(self, capsys, tmp_path):
        import numpy as np

        from dibc.behaviors import BehaviorTable, bits_to_index

        probs = np.zeros((8, 8))
        for s in range(8):
            probs[s, bits_to_index(((s >> 0) & 1, 0, 0))] = 1.0
        path = tmp_path / "signaling.json"
        path.write_text(json.dumps(BehaviorTable(3, probs).to_json_dict()))
        code, _, err = run_cli(capsys, "bc-run", "--table", str(path), "--trials", "10")
        assert code == EXIT_USAGE
        assert "signaling" in err


class TestStrategyFile:
    def test_alice_strategy_from_file(self, capsys, tmp_path):
        from dibc.adversaries import optimal_alice_ghz

        path = tmp_path / "alice.json"
        path.write_text(json.dumps(optimal_alice_ghz().to_json_dict()))
        code, out, _ = run_cli(
            capsys,
            "cheat", "alice", "--strategy-file", str(path),
            "--trials", "20000", "--format", "json",
        )
        assert code == EXIT_OK
        exact = next(r for r in json.loads(out)["results"] if r["name"] == "exact")
        assert abs(exact["value"] - 0.853553) < 1e-6


class TestOptimizerFailureExit:
    def test_non_convergence_exits_3(self, capsys, monkeypatch):
        from dibc import analysis as analysis_module
        from dibc.errors import OptimizerError

        def explode(config):
            raise OptimizerError("stuck")

        monkeypatch.setattr(analysis_module, "alice_control_bound", explode)
        code, _, err = run_cli(capsys, "bounds", "--which", "chsh")
        assert code == EXIT_NO_CONVERGENCE
        assert "converge" in err


class TestParsing:
    def test_no_command_is_usage_error(self, capsys):
        assert run_cli(capsys)[0] == EXIT_USAGE

    def test_unknown_flag_is_usage_error(self, capsys):
        assert run_cli(capsys, "bc-run", "--frobnicate")[0] == EXIT_USAGE

    def test_out_writes_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "bias-table", "--reps", "2", "--format", "json", "--out", str(path)
        )
        assert code == EXIT_OK and out == ""
        assert json.loads(path.read_text())["command"] == "bias-table"

    def test_human_format_mentions_checks(self, capsys):
        code, out, _ = run_cli(capsys, "bc-run", "--trials", "200", "--seed", "1")
        assert code == EXIT_OK
        assert "check noiseless-never-aborts" in out and "[ok]" in out
