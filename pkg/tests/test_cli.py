"""
End-to-end tests of the falqon-lab command line.
"""

import csv
import json

import pytest
from typer.testing import CliRunner

from falqon_lab.cli import app
from falqon_lab.config import get_settings
from falqon_lab.falqon import FalqonTrace
from falqon_lab.metrics import ensemble_summary
from falqon_lab.persistence import format_summary

pytestmark = pytest.mark.usefixtures("restore_root_logger")

runner = CliRunner()


def invoke(out_dir, *args):
    return runner.invoke(app, ["-o", str(out_dir), "-w", "1", "--log-level", "WARNING", *args])


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "edge.edges"
    path.write_text("n 2\n0 1\n", encoding="utf-8")
    return path


@pytest.fixture
def cubic6(tmp_path):
    out = tmp_path / "out"
    result = invoke(out, "gen-graphs", "--n", "6", "--degree", "3", "--count", "all")
    assert result.exit_code == 0, result.output
    return out


class TestGenGraphs:
    """Test graph generation."""

    def test_all_cubic_graphs_on_eight_vertices(self, tmp_path):
        result = invoke(tmp_path, "gen-graphs", "--n", "8", "--degree", "3", "--count", "all")
        assert result.exit_code == 0, result.output
        files = sorted((tmp_path / "graphs").glob("*.edges"))
        assert [f.name for f in files] == [f"graph_{i:03d}.edges" for i in range(5)]

        record = json.loads((tmp_path / "run.json").read_text())
        assert record["experiment"]["command"] == "gen-graphs"
        assert len(record["instances"]) == 5
        assert record["artifacts"][0] == "graphs/graph_000.edges"

    def test_random_weighted_graphs_are_seeded(self, tmp_path):
        args = ("gen-graphs", "--n", "8", "--count", "3", "--no-dedupe", "--weighted", "--seed", "4")
        assert invoke(tmp_path / "a", *args).exit_code == 0
        assert invoke(tmp_path / "b", *args).exit_code == 0
        for i in range(3):
            name = f"graphs/graph_{i:03d}.edges"
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_output_directory_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FALQON_LAB_OUTPUT_DIR", str(tmp_path / "env_out"))
        get_settings.cache_clear()
        result = runner.invoke(app, ["-w", "1", "--log-level", "WARNING", "gen-graphs", "--n", "6"])
        assert result.exit_code == 0, result.output
        out = tmp_path / "env_out"
        assert len(list((out / "graphs").glob("*.edges"))) == 2
        assert sorted(p.name for p in out.iterdir()) == [
            "graphs",
            "logs",
            "presets",
            "run.json",
            "traces",
        ]

    def test_file_logs_follow_output_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FALQON_LAB_OUTPUT_DIR", str(tmp_path / "env_out"))
        monkeypatch.setenv("FALQON_LAB_LOG_TO_FILE", "true")
        get_settings.cache_clear()
        result = invoke(tmp_path / "flag_out", "gen-graphs", "--n", "6")
        assert result.exit_code == 0, result.output
        assert (tmp_path / "flag_out" / "logs" / "falqon_lab.log").exists()
        assert not (tmp_path / "env_out").exists()

    def test_bad_count(self, tmp_path):
        result = invoke(tmp_path, "gen-graphs", "--count", "many")
        assert result.exit_code == 2
        assert '"category":"usage"' in result.output


class TestFalqonCommand:
    """Test the falqon subcommand and its artifacts."""

    def test_artifacts_are_reproducible(self, cubic6):
        args = ("falqon", "--dt", "0.05", "--layers", "20", "--seed", "9")
        assert invoke(cubic6, *args).exit_code == 0
        first = {
            name: (cubic6 / name).read_bytes()
            for name in ("traces/instance_000.csv", "traces/instance_001.json", "run.json")
        }
        assert invoke(cubic6, *args).exit_code == 0
        for name, content in first.items():
            assert (cubic6 / name).read_bytes() == content

    def test_summary_matches_traces(self, cubic6):
        assert invoke(cubic6, "falqon", "--dt", "0.05", "--layers", "15").exit_code == 0
        records = [
            json.loads((cubic6 / f"traces/instance_{i:03d}.json").read_text()) for i in range(2)
        ]
        traces = [FalqonTrace.from_dict(record["trace"]) for record in records]
        assert (cubic6 / "summary.csv").read_text() == format_summary(ensemble_summary(traces))

        with open(cubic6 / "traces/instance_000.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 15
        assert rows[0]["layer"] == "1"

    def test_sampled_estimator(self, cubic6):
        result = invoke(
            cubic6, "falqon", "--dt", "0.05", "--layers", "5",
            "--estimator", "pauli_shots", "--shots", "10",
        )
        assert result.exit_code == 0, result.output
        record = json.loads((cubic6 / "run.json").read_text())
        assert record["experiment"]["parameters"]["estimator"]["mode"] == "pauli_shots"
        seeds = [instance["seed"] for instance in record["instances"]]
        assert len(set(seeds)) == 2

    def test_missing_time_step(self, cubic6):
        result = invoke(cubic6, "falqon", "--layers", "5")
        assert result.exit_code == 2
        assert '"category":"usage"' in result.output
        assert "no time step" in result.output

    def test_missing_graphs(self, tmp_path):
        result = invoke(tmp_path, "falqon", "--dt", "0.05")
        assert result.exit_code == 2

    def test_capacity_error(self, cubic6, monkeypatch):
        monkeypatch.setenv("FALQON_LAB_MAX_STATEVECTOR_QUBITS", "4")
        get_settings.cache_clear()
        result = invoke(cubic6, "falqon", "--dt", "0.05", "--layers", "5")
        assert result.exit_code == 3
        assert '"category":"capacity"' in result.output

    def test_config_file_precedence(self, cubic6, tmp_path):
        config = tmp_path / "params.json"
        config.write_text(json.dumps({"dt": 0.04, "layers": 7}), encoding="utf-8")

        assert runner.invoke(
            app, ["-o", str(cubic6), "-w", "1", "--config", str(config), "falqon"]
        ).exit_code == 0
        record = json.loads((cubic6 / "run.json").read_text())
        assert record["experiment"]["parameters"]["max_layers"] == 7
        assert record["experiment"]["parameters"]["dt"] == 0.04

        assert runner.invoke(
            app,
            ["-o", str(cubic6), "-w", "1", "--config", str(config), "falqon", "--layers", "3"],
        ).exit_code == 0
        record = json.loads((cubic6 / "run.json").read_text())
        assert record["experiment"]["parameters"]["max_layers"] == 3

    def test_bad_config_file(self, tmp_path):
        config = tmp_path / "params.json"
        config.write_text("[1, 2]", encoding="utf-8")
        result = runner.invoke(app, ["--config", str(config), "falqon"])
        assert result.exit_code == 2
        assert "JSON object" in result.output


class TestOtherCommands:
    """Test the remaining subcommands on small instances."""

    def test_falqon_iter(self, cubic6):
        result = invoke(cubic6, "falqon-iter", "--dt", "0.05", "--layers", "10", "-J", "2")
        assert result.exit_code == 0, result.output
        assert (cubic6 / "traces/instance_000_iter1.json").exists()
        assert (cubic6 / "summary_iter0.csv").exists()
        assert (cubic6 / "summary_iter1.csv").exists()

    def test_falqon_plus(self, cubic6):
        result = invoke(cubic6, "falqon-plus", "--dt", "0.1", "--layers", "3", "--max-iters", "50")
        assert result.exit_code == 0, result.output
        with open(cubic6 / "falqon_plus/summary.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 2
        for row in rows:
            assert float(row["r_A"]) >= float(row["falqon_r_A"]) - 1e-12

    def test_qaoa_multistart(self, edge_file, tmp_path):
        result = invoke(
            tmp_path / "out", "qaoa-multistart", "-g", str(edge_file),
            "--layers", "1", "--starts", "3",
        )
        assert result.exit_code == 0, result.output
        stats = json.loads((tmp_path / "out/multistart/instance_000.json").read_text())
        assert len(stats["results"]) == 3

    def test_anneal(self, edge_file, tmp_path):
        result = invoke(tmp_path / "out", "anneal", "-g", str(edge_file), "--T", "2", "--dt", "0.1")
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "out/summary_anneal.csv").read_text().splitlines()
        assert len(lines) == 11

    def test_compare(self, edge_file, tmp_path):
        out = tmp_path / "out"
        result = invoke(
            out, "compare", "-g", str(edge_file), "--against", "anneal",
            "--threshold", "rA=0.9", "--dt", "0.05", "--layers", "600",
        )
        assert result.exit_code == 0, result.output
        with open(out / "compare_summary.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 1
        assert float(rows[0]["T"]) > 0
        assert (out / "traces/instance_000_anneal.json").exists()

    def test_compare_rejects_other_baselines(self, edge_file, tmp_path):
        result = invoke(tmp_path, "compare", "-g", str(edge_file), "--against", "qaoa", "--dt", "0.1")
        assert result.exit_code == 2

    def test_dt_scan_preset_feeds_falqon(self, edge_file, tmp_path):
        out = tmp_path / "out"
        result = invoke(
            out, "dt-scan", "-g", str(edge_file), "--layers", "20",
            "--refine-steps", "1", "--save-preset", "edge",
        )
        assert result.exit_code == 0, result.output
        scan = json.loads((out / "dt_scan.json").read_text())
        assert (out / "presets/edge.json").exists()

        result = invoke(out, "falqon", "-g", str(edge_file), "--preset", "edge", "--layers", "5")
        assert result.exit_code == 0, result.output
        record = json.loads((out / "run.json").read_text())
        assert record["experiment"]["parameters"]["dt"] == scan["dt_critical"]

    def test_unknown_preset(self, edge_file, tmp_path):
        result = invoke(tmp_path, "falqon", "-g", str(edge_file), "--preset", "nope")
        assert result.exit_code == 2
        assert "dt-scan" in result.output

    def test_diagnose(self, cubic6):
        assert invoke(cubic6, "falqon", "--dt", "0.05", "--layers", "10").exit_code == 0
        result = invoke(cubic6, "diagnose", "--trace", str(cubic6 / "traces/instance_000.json"))
        assert result.exit_code == 0, result.output
        report = json.loads((cubic6 / "diagnose.json").read_text())
        assert report["graphs"] == []
        assert report["traces"][0]["layers"] == 10

        result = invoke(cubic6, "diagnose")
        assert result.exit_code == 0, result.output
        report = json.loads((cubic6 / "diagnose.json").read_text())
        assert len(report["graphs"]) == 2
        assert {g["solution"]["max_cut_value"] for g in report["graphs"]} == {7.0, 9.0}
        assert report["graphs"][0]["criteria"]["degenerate_eigenvalues"] is True
