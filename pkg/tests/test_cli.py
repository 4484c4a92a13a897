import csv
import io
import json

import pytest
from click.testing import CliRunner

from rhodiff.cli import main
from rhodiff.tableio import load_fixture, table_to_json, table_to_text


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ome_file(tmp_path, ome):
    path = tmp_path / "ome.tbl"
    path.write_text(table_to_text(ome))
    return str(path)


class TestTestCommand:
    def test_text_output_matches_published_values(self, runner, ome_file):
        res = runner.invoke(main, ["test", ome_file])
        assert res.exit_code == 0
        assert "0.0293" in res.output and "0.8641" in res.output
        assert "0.6482" in res.output and "-0.0119" in res.output

    def test_renderings_carry_identical_numbers(self, runner, ome_file):
        text = runner.invoke(main, ["test", ome_file]).output
        as_json = json.loads(runner.invoke(main, ["test", ome_file,
                                                  "--format", "json"]).output)
        row = next(csv.DictReader(io.StringIO(
            runner.invoke(main, ["test", ome_file, "--format", "csv"]).output)))
        for name in ("lr", "wald", "score"):
            q = as_json["tests"][name]["statistic"]
            p = as_json["tests"][name]["p_value"]
            assert float(row[f"{name}_statistic"]) == pytest.approx(q, abs=5e-5)
            assert float(row[f"{name}_p_value"]) == pytest.approx(p, abs=5e-5)
            assert f"{q:.4f}" in text and f"{p:.4f}" in text

    def test_json_format_full_precision(self, runner, ome_file):
        out = json.loads(runner.invoke(main, ["test", ome_file,
                                              "--format", "json"]).output)
        assert out["schema_version"] == "1"
        assert abs(out["unconstrained"]["delta"] + 0.0118967271280348) < 1e-12

    def test_orthok_json_fixture(self, runner, tmp_path, orthok):
        path = tmp_path / "orthok.json"
        path.write_text(json.dumps(table_to_json(orthok)))
        res = runner.invoke(main, ["test", str(path)])
        assert res.exit_code == 0
        assert "3.1689" in res.output and "0.0751" in res.output

    def test_empty_file_exit_2(self, runner, tmp_path):
        path = tmp_path / "empty.tbl"
        path.write_text("")
        res = runner.invoke(main, ["test", str(path)])
        assert res.exit_code == 2

    def test_missing_file_exit_2(self, runner):
        res = runner.invoke(main, ["test", "/nonexistent/nowhere.tbl"])
        assert res.exit_code == 2

    def test_bad_delta0_exit_2(self, runner, ome_file):
        res = runner.invoke(main, ["test", ome_file, "--delta0", "1.5"])
        assert res.exit_code == 2

    def test_nonconvergence_exit_3(self, runner, ome_file):
        res = runner.invoke(main, ["test", ome_file, "--max-iterations", "1"])
        assert res.exit_code == 3


class TestPowerCommand:
    ARGS = ["power", "--pi1", "0.2", "--rho", "0.1", "--delta1", "0.2",
            "--m", "20", "--n", "20", "--replicates", "500", "--seed", "3"]

    def test_runs_and_is_deterministic(self, runner):
        a = runner.invoke(main, self.ARGS + ["--format", "json"])
        b = runner.invoke(main, self.ARGS + ["--format", "json"])
        assert a.exit_code == 0
        assert a.output == b.output
        rates = json.loads(a.output)["tests"]
        assert 0.0 <= rates["score"]["rate"] <= 1.0

    def test_single_replicate_rate_is_binary(self, runner):
        res = runner.invoke(main, ["power", "--pi1", "0.2", "--rho", "0.1",
                                   "--delta1", "0.2", "--replicates", "1",
                                   "--seed", "3", "--format", "json"])
        rates = json.loads(res.output)["tests"]
        for entry in rates.values():
            assert entry["rate"] in (0.0, 1.0) or entry["rate"] is None

    def test_inadmissible_exit_2(self, runner):
        res = runner.invoke(main, ["power", "--pi1", "0.1", "--rho", "-0.5",
                                   "--delta1", "0.1"])
        assert res.exit_code == 2

    def test_csv_format(self, runner):
        res = runner.invoke(main, self.ARGS + ["--format", "csv"])
        rows = list(csv.DictReader(io.StringIO(res.output)))
        assert [r["test"] for r in rows] == ["lr", "wald", "score"]


class TestSampleSizeCommand:
    def test_tiny_target(self, runner):
        res = runner.invoke(main, ["samplesize", "--pi1", "0.3", "--rho", "0",
                                   "--delta1", "0.3", "--power", "0.0001",
                                   "--replicates", "400", "--format", "json"])
        assert res.exit_code == 0
        assert json.loads(res.output)["sample_size"] == 1

    def test_invalid_target_exit_2(self, runner):
        res = runner.invoke(main, ["samplesize", "--pi1", "0.3", "--rho", "0",
                                   "--delta1", "0.3", "--power", "1.0"])
        assert res.exit_code == 2


class TestSweepCommand:
    def test_csv_written_and_reproducible(self, runner, tmp_path):
        out1 = tmp_path / "s1.csv"
        out2 = tmp_path / "s2.csv"
        args = ["tie-sweep", "--count", "3", "--replicates", "200", "--seed", "17"]
        assert runner.invoke(main, args + ["--out", str(out1)]).exit_code == 0
        assert runner.invoke(main, args + ["--out", str(out2)]).exit_code == 0
        assert out1.read_bytes() == out2.read_bytes()
        rows = list(csv.DictReader(out1.open()))
        assert len(rows) == 3
        assert {"lr_rate", "wald_rate", "score_rate"} <= set(rows[0])
