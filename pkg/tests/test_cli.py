"""Tests for affperm CLI commands."""

import json

import ot
import pytest
from click.testing import CliRunner

from affperm.cli import main
from affperm.records import read_records
from affperm.verify import Suite


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def isolated(tmp_path, monkeypatch):
    """Run in an empty directory with no config overrides."""
    for name in ("AFFPERM_CONFIG", "AFFPERM_CAP", "AFFPERM_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


class TestHelp:
    def test_aliases_listed(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "total (t)" in result.output
        assert "psi" in result.output

    def test_alias(self, runner, isolated):
        result = runner.invoke(main, ["t", "-n", "2"])
        assert result.exit_code == 0
        assert result.output == "3\n"


class TestInit:
    def test_init(self, runner, isolated):
        result = runner.invoke(main, ["init"])
        assert result.exit_code == 0
        assert "Initialized" in result.output
        assert "cap: 7" in (isolated / ".affperm.yaml").read_text()

    def test_init_twice(self, runner, isolated):
        runner.invoke(main, ["init"])
        result = runner.invoke(main, ["init"])
        assert result.exit_code == 0
        assert "Already initialized" in result.output


class TestCounting:
    def test_total_brute(self, runner, isolated):
        result = runner.invoke(main, ["total", "--n", "2", "--method", "brute"])
        assert result.exit_code == 0
        assert result.output == "3\n"

    def test_total_formula(self, runner, isolated):
        result = runner.invoke(main, ["total", "-n", "3"])
        assert result.output == "13\n"

    def test_total_asymptotic_large(self, runner, isolated):
        result = runner.invoke(main, ["total", "-n", "500", "-m", "asymptotic"])
        assert result.exit_code == 0
        assert "e+" in result.output

    def test_brute_over_cap(self, runner, isolated, monkeypatch):
        monkeypatch.setenv("AFFPERM_CAP", "3")
        result = runner.invoke(main, ["total", "-n", "5", "-m", "brute"])
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_avoiders(self, runner, isolated):
        result = runner.invoke(main, ["avoiders", "-n", "2", "-k", "2"])
        assert result.exit_code == 0
        assert result.output == "3\n"

    def test_avoiders_upper_bound(self, runner, isolated):
        result = runner.invoke(main, ["avoiders", "-n", "3", "-p", "321", "-m", "upper-bound"])
        assert result.output == "27\n"

    def test_upper_bound_needs_decreasing(self, runner, isolated):
        result = runner.invoke(main, ["avoiders", "-n", "3", "-p", "2143", "-m", "upper-bound"])
        assert result.exit_code == 2

    def test_k_and_pattern(self, runner, isolated):
        result = runner.invoke(main, ["avoiders", "-n", "3", "-k", "2", "-p", "321"])
        assert result.exit_code == 2

    def test_bad_pattern(self, runner, isolated):
        result = runner.invoke(main, ["avoiders", "-n", "3", "-p", "3221"])
        assert result.exit_code == 2

    def test_z(self, runner):
        result = runner.invoke(main, ["z", "-P", "1,1"])
        assert result.output == "3\n"

    def test_zstar(self, runner):
        result = runner.invoke(main, ["zstar", "--k", "4"])
        assert result.exit_code == 0
        assert result.output == "16/3\n"

    def test_zstar_needs_k(self, runner):
        assert runner.invoke(main, ["zstar"]).exit_code == 2

    def test_growth(self, runner, isolated):
        result = runner.invoke(main, ["growth", "-k", "2", "-S", "2,3"])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == f"2\t{3 ** 0.5:.12g}"
        assert lines[1].startswith("3\t")


class TestCheck:
    def test_contains(self, runner, tmp_path):
        path = write(tmp_path / "perm.json", {"size": 6, "window": [2, 7, -2, -1, 9, 6]})
        result = runner.invoke(main, ["check", "--perm", path, "--pattern", "321"])
        assert result.exit_code == 0
        assert result.output == "CONTAINS 5 6 9\n"

    def test_avoids(self, runner, tmp_path):
        path = write(tmp_path / "id.json", {"size": 3, "window": [1, 2, 3]})
        result = runner.invoke(main, ["c", "-P", path, "-p", "21"])
        assert result.output == "AVOIDS\n"

    def test_invalid_perm(self, runner, tmp_path):
        path = write(tmp_path / "bad.json", {"size": 3, "window": [1, 2, 4]})
        result = runner.invoke(main, ["check", "-P", path, "-p", "321"])
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_malformed_json(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        result = runner.invoke(main, ["check", "-P", str(path), "-p", "321"])
        assert result.exit_code == 1
        assert "invalid JSON" in result.output


class TestPsi:
    TUPLE = {
        "n": [4, 6],
        "G": [[1, 5, 6, 9], [2, 3, 4, 7, 8, 10]],
        "H": [[2, 3, 6, 10], [1, 4, 5, 7, 8, 9]],
        "delta": [2, -2],
    }
    WINDOW = [6, -2, -1, 1, 10, 12, 4, 5, 13, 7]

    def test_encode(self, runner, tmp_path):
        src = write(tmp_path / "tuple.json", self.TUPLE)
        out = tmp_path / "perm.json"
        result = runner.invoke(main, ["psi", "encode", "-i", src, "-o", str(out)])
        assert result.exit_code == 0
        assert json.loads(out.read_text()) == {"size": 10, "window": self.WINDOW}

    def test_decode(self, runner, tmp_path):
        src = write(tmp_path / "perm.json", {"size": 10, "window": self.WINDOW})
        result = runner.invoke(main, ["psi", "decode", "-i", src, "-k", "2"])
        assert result.exit_code == 0
        assert json.loads(result.output) == self.TUPLE

    def test_decode_too_many_ranks(self, runner, tmp_path):
        src = write(tmp_path / "perm.json", {"size": 6, "window": [2, 7, -2, -1, 9, 6]})
        result = runner.invoke(main, ["psi", "d", "-i", src, "-k", "2"])
        assert result.exit_code == 1

    def test_encode_invalid_tuple(self, runner, tmp_path):
        src = write(tmp_path / "tuple.json", {**self.TUPLE, "delta": [2, -1]})
        out = tmp_path / "perm.json"
        result = runner.invoke(main, ["psi", "encode", "-i", src, "-o", str(out)])
        assert result.exit_code == 1
        assert not out.exists()


class TestSample:
    def test_exact(self, runner, isolated):
        result = runner.invoke(main, ["sample", "-n", "4", "-k", "2", "-c", "5", "-s", "1", "-o", "a.json"])
        assert result.exit_code == 0
        data = json.loads((isolated / "a.json").read_text())
        assert len(data) == 5
        assert all(d["size"] == 4 for d in data)

    def test_deterministic(self, runner, isolated):
        args = ["sample", "-n", "4", "-k", "2", "-c", "5", "-s", "3"]
        assert runner.invoke(main, args).output == runner.invoke(main, args).output

    def test_mcmc_chains(self, runner, isolated):
        result = runner.invoke(main, [
            "s", "-n", "4", "-p", "321", "-m", "mcmc", "-c", "3", "--thin", "2", "--burnin", "10", "--chains", "2",
        ])
        assert result.exit_code == 0
        assert len(json.loads(result.output)) == 6

    def test_exact_over_cap(self, runner, isolated):
        result = runner.invoke(main, ["sample", "-n", "9", "-k", "2"])
        assert result.exit_code == 1


class TestConverge:
    def test_records(self, runner, isolated):
        args = ["converge", "-k", "2", "-S", "4,5", "--samples", "3", "-M", "8", "--no-timing", "-s", "2"]
        result = runner.invoke(main, [*args, "-o", "first.csv"])
        assert result.exit_code == 0
        runner.invoke(main, [*args, "-o", "second.csv"])
        first = (isolated / "first.csv").read_bytes()
        assert first == (isolated / "second.csv").read_bytes()

        records = read_records(isolated / "first.csv", command="converge")
        assert [r.parameters["N"] for r in records] == [4, 5]
        assert all(r.elapsed_seconds == 0 and r.seed == 2 for r in records)
        assert all(r.outputs["wass2_estimate"] > 0 for r in records)

    def test_parquet(self, runner, isolated):
        result = runner.invoke(main, ["cv", "-k", "2", "-S", "4", "--samples", "2", "-M", "4", "-o", "out.parquet"])
        assert result.exit_code == 0
        (record,) = read_records(isolated / "out.parquet")
        assert record.command == "converge"
        assert record.parameters == {"k": 2, "N": 4, "samples": 2, "segments": 4}

    def test_transport_failure(self, runner, isolated, monkeypatch):
        real = ot.emd

        def stalled(*args, **kwargs):
            plan, log = real(*args, **kwargs)
            log["warning"] = "numItermax reached before optimality"
            return plan, log

        monkeypatch.setattr(ot, "emd", stalled)
        result = runner.invoke(main, ["cv", "-k", "2", "-S", "4", "--samples", "2", "-M", "4", "-o", "out.csv"])
        assert result.exit_code == 1
        assert "error: transport:" in result.output
        assert result.exception is None or isinstance(result.exception, SystemExit)


class TestVerify:
    def test_all_pass(self, runner, monkeypatch):
        monkeypatch.setattr(
            "affperm.cli.misc.selected_suites",
            lambda level: [Suite("first", lambda full, seed: (True, "ok")), Suite("second", lambda full, seed: (True, "ok"))],
        )
        result = runner.invoke(main, ["verify"])
        assert result.exit_code == 0
        assert "All 2 suites passed" in result.output

    def test_failure(self, runner, monkeypatch):
        monkeypatch.setattr(
            "affperm.cli.misc.selected_suites",
            lambda level: [Suite("broken", lambda full, seed: (False, "nope"))],
        )
        result = runner.invoke(main, ["v", "-l", "full"])
        assert result.exit_code == 1
        assert "broken" in result.output

    def test_bad_level(self, runner):
        assert runner.invoke(main, ["verify", "-l", "medium"]).exit_code == 2
