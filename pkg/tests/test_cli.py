# ABOUTME: Tests for the kle-workbench command line: subcommands, exit codes and output files.
# ABOUTME: Runs main() in-process with captured stdout/stderr; no subprocesses.

import csv
import json

from kle_workbench.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE


class TestAttackCommand:
    def test_q1_attack_prints_report(self, run_cli):
        code, out, _ = run_cli("attack", "--name", "3xce-q1-mitm", "--kappa", 8, "--n", 8, "--seed", 42)
        report = json.loads(out)
        assert code == EXIT_OK
        assert report["success"] is True
        assert report["ledger"]["qram_entries"] == 0
        assert report["model"] == "Q1"

    def test_partitioned_grover_attack(self, run_cli):
        code, out, _ = run_cli(
            "attack", "--name", "grover-mitm-2kte", "--kappa", 12, "--n", 12, "--r", 4, "--seed", 7
        )
        assert code == EXIT_OK
        assert json.loads(out)["ledger"]["qram_entries"] == 1024

    def test_report_written_to_file_is_reproducible(self, run_cli, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for path in (first, second):
            code, _, _ = run_cli("attack", "--name", "sitm-3xce", "--seed", 5, "--out", path)
            assert code == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_failed_attack_exits_2(self, run_cli):
        # Two plaintexts almost never hold a mirror slid pair.
        codes = {run_cli("attack", "--name", "mirror-slide-q1", "--t", 2, "--seed", s)[0] for s in range(3)}
        assert EXIT_FAILED in codes

    def test_unknown_attack_is_a_usage_error(self, run_cli):
        code, _, err = run_cli("attack", "--name", "no-such-attack")
        assert code == EXIT_USAGE
        assert "qcf-mitm-2kte" in err

    def test_conflicting_model_is_a_usage_error(self, run_cli):
        code, _, err = run_cli("attack", "--name", "grover-mitm-2kte", "--model", "Q1")
        assert code == EXIT_USAGE
        assert "model" in err

    def test_config_file_with_flag_override(self, run_cli, tmp_path):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({"attack": "sitm-3xce", "seed": 1}))
        code, out, _ = run_cli("attack", "--config", path, "--seed", 2)
        assert code == EXIT_OK
        assert json.loads(out)["seed"] == 2

    def test_missing_config_file(self, run_cli, tmp_path):
        code, _, err = run_cli("attack", "--config", tmp_path / "absent.json")
        assert code == EXIT_USAGE
        assert "error:" in err

    def test_missing_subcommand(self, run_cli):
        code, _, _ = run_cli()
        assert code == EXIT_USAGE


class TestSweepCommand:
    def test_sweep_writes_grouped_csv(self, run_cli, tmp_path):
        path = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            "sweep", "--name", "3xce-q2-tradeoff", "--kappa", 4, "--n", 8,
            "--r-values", "1,2,4,8", "--trials", 2, "--out", path,
        )
        assert code == EXIT_OK
        with path.open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len([row for row in rows if row["row_type"] == "summary"]) == 4

    def test_sweep_is_byte_identical_across_runs(self, run_cli, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            run_cli("sweep", "--name", "sitm-3xce", "--trials", 3, "--seed", 4, "--out", path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_sweep_needs_out(self, run_cli):
        code, _, err = run_cli("sweep", "--name", "sitm-3xce")
        assert code == EXIT_USAGE
        assert "--out" in err

    def test_bad_value_list(self, run_cli, tmp_path):
        code, _, _ = run_cli("sweep", "--name", "sitm-3xce", "--kappa-values", "8,x", "--out", tmp_path / "s.csv")
        assert code == EXIT_USAGE


class TestVerifyCommand:
    def test_grover_suite_passes(self, run_cli):
        code, out, _ = run_cli("verify", "--suite", "grover")
        assert code == EXIT_OK
        assert "PASS grover closed form" in out

    def test_propositions_suite_passes(self, run_cli):
        code, out, _ = run_cli("verify", "--suite", "propositions", "--trials", 50)
        assert code == EXIT_OK
        assert "FAIL" not in out

    def test_mirror_suite_passes(self, run_cli):
        code, out, _ = run_cli("verify", "--suite", "mirror", "--trials", 50)
        assert code == EXIT_OK
        assert "PASS mirror implication violations: 0" in out


class TestGroverCommand:
    def test_demo_matches_closed_form(self, run_cli):
        code, out, _ = run_cli("grover", "--width", 10, "--marked", 1, "--shots", 200)
        result = json.loads(out)
        assert code == EXIT_OK
        assert result["iterations"] == 26
        assert result["max_error"] < 1e-9
        assert result["hit_frequency"] > 0.9

    def test_explicit_iterations_and_full_vector(self, run_cli):
        code, out, _ = run_cli("grover", "--width", 8, "--marked", 2, "--iterations", 3, "--full-vector")
        result = json.loads(out)
        assert code == EXIT_OK
        assert result["iterations"] == 3
        assert result["max_error"] < 1e-9

    def test_marked_out_of_range(self, run_cli):
        code, _, _ = run_cli("grover", "--width", 4, "--marked", 17)
        assert code == EXIT_USAGE

    def test_bad_iterations(self, run_cli):
        code, _, _ = run_cli("grover", "--width", 4, "--iterations", "many")
        assert code == EXIT_USAGE


class TestPredictCommand:
    def test_full_scale_table(self, run_cli):
        code, out, _ = run_cli("predict", "--kappa", 56, "--n", 64)
        table = json.loads(out)
        assert code == EXIT_OK
        assert table["qcf-mitm-2kte"]["time_exponent"] == "112/3"
        assert table["grover-mitm-2kte"]["qram_exponent"] == "56"
        assert table["mirror-slide-q1"]["worse_than_bruteforce"] is True

    def test_partition_argument(self, run_cli):
        _, out, _ = run_cli("predict", "--kappa", 56, "--n", 64, "--r", 16384)
        assert json.loads(out)["tradeoff-mitm-2kte"]["time_exponent"] == "42"
