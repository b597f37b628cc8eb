"""Tests for run configuration and the command-line workflows."""

import csv
import json
from pathlib import Path

import pytest

from quasidarwin.cli import CircuitOptions, RunConfig, SettingSpec, main, run_exact
from quasidarwin.core.exceptions import ConfigError, InvalidSettingError
from quasidarwin.core.model import ModelParams


def _read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestRunConfig:
    """Tests for configuration records."""

    def test_defaults(self) -> None:
        """Test the default run configuration."""
        config = RunConfig()
        assert config.model.omega == 1.5
        assert config.taus == (0.0, 2.21, 3.66)
        assert config.setting.kind == "benchmark"
        assert config.circuit.noise == "none"

    def test_seed_propagates_to_sweep(self) -> None:
        """Test that the top-level seed is copied into the sweep config."""
        config = RunConfig(seed=42)
        assert config.sweep.seed == 42
        assert config.with_overrides({"seed": 7}).sweep.seed == 7

    def test_overrides_merge_nested(self) -> None:
        """Test that overrides merge into nested blocks without dropping siblings."""
        config = RunConfig().with_overrides({"model": {"omega": 0.5}, "circuit": {"shots": None}})
        assert config.model.omega == 0.5
        assert config.model.couplings == (1.0, 1.0)
        assert config.circuit.shots is None

    def test_from_file_accepts_bare_config_and_manifest(self, tmp_path: Path) -> None:
        """Test that a config loads from a bare file or from a manifest."""
        config = RunConfig(seed=3, taus=(1.0,))
        bare = tmp_path / "config.json"
        bare.write_text(config.model_dump_json())
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"config": config.model_dump(mode="json"), "seed": 3, "version": "x"}))
        assert RunConfig.from_file(bare) == config
        assert RunConfig.from_file(manifest) == config

    def test_from_file_errors(self, tmp_path: Path) -> None:
        """Test that missing, broken and invalid config files raise ConfigError."""
        with pytest.raises(ConfigError):
            RunConfig.from_file(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(ConfigError):
            RunConfig.from_file(broken)
        invalid = tmp_path / "invalid.json"
        invalid.write_text(json.dumps({"taus": [-1.0]}))
        with pytest.raises(ConfigError, match="taus"):
            RunConfig.from_file(invalid)

    def test_unknown_noise_preset(self) -> None:
        """Test that an unknown noise preset is rejected."""
        with pytest.raises(ConfigError):
            CircuitOptions(noise="bogus")

    def test_noise_alias(self) -> None:
        """Test that the short noise alias resolves to the device preset."""
        options = CircuitOptions(noise="ibm")
        model = options.noise_model()
        assert model is not None and model.name == "ibm-torino"

    @pytest.mark.parametrize(("alias", "name"), [("table4-ibm", "ibm-torino"), ("table4-ionq", "ionq-aria")])
    def test_table_noise_aliases(self, alias: str, name: str) -> None:
        """Test that the table-style preset names resolve to the device presets."""
        model = CircuitOptions(noise=alias).noise_model()
        assert model is not None and model.name == name

    def test_setting_alias(self) -> None:
        """Test that the inferred-setting alias resolves to the benchmark kind."""
        assert SettingSpec(kind="paper-inferred").kind == "benchmark"
        config = RunConfig().with_overrides({"setting": {"kind": "paper-inferred"}})
        assert config.setting == SettingSpec()


class TestSettingSpec:
    """Tests for resolving setting specifications."""

    def test_bases(self) -> None:
        """Test that a bases setting resolves on the default model."""
        setting = SettingSpec(kind="bases", basis_a="X", basis_b="Z", initial=("+", "0", "1")).resolve(ModelParams(), 0)
        assert setting.n_qubits == 3

    def test_bloch(self) -> None:
        """Test that a Bloch-vector setting builds the requested projectors."""
        spec = SettingSpec(kind="bloch", bloch_a=(1.0, 0.0, 0.0), bloch_b=(0.0, 0.0, -1.0), initial=((0.0, 1.0, 0.0), "0", "0"))
        setting = spec.resolve(ModelParams(), 0)
        assert setting.b0.entries[1, 1] == pytest.approx(1.0)

    def test_random_is_seeded(self) -> None:
        """Test that the random setting depends only on the seed."""
        spec = SettingSpec(kind="random")
        a = spec.resolve(ModelParams(), 9)
        b = spec.resolve(ModelParams(), 9)
        assert (a.a0.entries == b.a0.entries).all()

    def test_initial_length_checked(self) -> None:
        """Test that the initial factors must match the qubit count."""
        with pytest.raises(InvalidSettingError, match="initial"):
            SettingSpec(kind="bases", initial=("0", "0")).resolve(ModelParams(), 0)

    def test_benchmark_needs_two_environment_qubits(self) -> None:
        """Test that the benchmark setting rejects a three-qubit environment."""
        with pytest.raises(InvalidSettingError):
            SettingSpec().resolve(ModelParams(couplings=(1.0, 1.0, 1.0)), 0)

    def test_same_sites_rejected(self) -> None:
        """Test that measuring A and B on one site is rejected."""
        with pytest.raises(InvalidSettingError, match="site"):
            SettingSpec(kind="bases", site_a=2, site_b=2).resolve(ModelParams(), 0)


class TestExact:
    """Tests for the exact workflow."""

    def test_report(self, temp_output_dir: Path) -> None:
        """Test that the exact workflow reproduces the benchmark values."""
        config = RunConfig(output={"path": temp_output_dir})
        report = run_exact(config)
        assert [a.time_a for a in report.analyses] == [0.0, 2.21, 3.66]
        assert report.analyses[2].report.n_as == pytest.approx(0.988, abs=0.002)
        assert report.inference is not None and report.inference.matched

    def test_json_output_and_rerun(self, temp_output_dir: Path) -> None:
        """Test that rerunning from the manifest rewrites identical files."""
        assert main(["exact", "--out", str(temp_output_dir), "-q"]) == 0
        data = json.loads((temp_output_dir / "exact.json").read_text())
        assert len(data["analyses"]) == 3
        assert set(data["analyses"][0]["kd"]["q"][0][0]) == {"re", "im"}
        manifest = json.loads((temp_output_dir / "manifest.json").read_text())
        assert manifest["outputs"] == ["exact.json"]
        assert manifest["config"]["command"] == "exact"

        before = {p.name: p.read_bytes() for p in temp_output_dir.iterdir()}
        assert main(["exact", "--config", str(temp_output_dir / "manifest.json"), "-q"]) == 0
        after = {p.name: p.read_bytes() for p in temp_output_dir.iterdir()}
        assert before == after

    def test_csv_output(self, temp_output_dir: Path) -> None:
        """Test the layout of the exact CSV outputs."""
        assert main(["exact", "--tau", "0,3.66", "--format", "csv", "--out", str(temp_output_dir), "-q"]) == 0
        rows = _read_csv(temp_output_dir / "exact_q.csv")
        assert len(rows) == 8
        assert list(rows[0]) == ["tau", "i", "j", "q_re", "q_im", "p", "real_term", "imag_term"]
        measures = _read_csv(temp_output_dir / "exact_measures.csv")
        assert float(measures[1]["n_as"]) == pytest.approx(0.988, abs=0.002)
        assert (temp_output_dir / "exact_q.csv").read_bytes().count(b"\r") == 0


class TestSweepCommand:
    """Tests for the sweep workflow."""

    def test_csv_outputs(self, temp_output_dir: Path) -> None:
        """Test the row counts of the sweep CSV outputs."""
        argv = ["sweep", "--omega", "0,1.5", "--settings", "20", "--seed", "7", "--format", "csv", "-q"]
        assert main([*argv, "--out", str(temp_output_dir)]) == 0
        heatmap = _read_csv(temp_output_dir / "heatmap.csv")
        assert len(heatmap) == 2 * 401 * 101
        assert sum(int(r["count"]) for r in heatmap if r["omega"] == "0.0") == 20 * 401
        cdf = _read_csv(temp_output_dir / "cdf.csv")
        assert len(cdf) == 40
        assert float(cdf[19]["cum_frac"]) == 1.0
        designated = _read_csv(temp_output_dir / "designated.csv")
        assert len(designated) == 2 * 401

    def test_worker_count_does_not_change_results(self, tmp_path: Path) -> None:
        """Test that sweep outputs are byte-identical for 1 and 4 workers."""
        argv = ["sweep", "--omega", "1.0", "--settings", "30", "--seed", "5", "--format", "csv", "-q"]
        assert main([*argv, "--workers", "1", "--out", str(tmp_path / "a")]) == 0
        assert main([*argv, "--workers", "4", "--out", str(tmp_path / "b")]) == 0
        for name in ("heatmap.csv", "cdf.csv", "designated.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestCircuitCommand:
    """Tests for the circuit and bench workflows."""

    def test_exact_probabilities_with_gate_export(self, temp_output_dir: Path) -> None:
        """Test that exact decoding matches theory and gate lists are exported."""
        argv = ["circuit", "--tau", "0", "--shots", "exact", "--format", "csv", "--export-gates", "-q"]
        assert main([*argv, "--out", str(temp_output_dir)]) == 0
        summary = _read_csv(temp_output_dir / "circuit_summary.csv")
        assert float(summary[0]["rmse"]) <= 1e-10
        entries = _read_csv(temp_output_dir / "circuit_entries.csv")
        assert len(entries) == 4
        gate_files = sorted((temp_output_dir / "gates").iterdir())
        assert len(gate_files) == 8
        assert gate_files[0].read_text().startswith("# cnot_count")
        manifest = json.loads((temp_output_dir / "manifest.json").read_text())
        assert "gates/tau0_q00_real.txt" in manifest["outputs"]

    def test_table_preset_and_setting_names(self, temp_output_dir: Path) -> None:
        """Test that the table-style noise name and the inferred-setting name run end to end."""
        argv = ["circuit", "--noise", "table4-ibm", "--setting", "paper-inferred", "--tau", "0"]
        argv += ["--shots", "exact", "--trajectories", "1", "-q", "--out", str(temp_output_dir)]
        assert main(argv) == 0
        data = json.loads((temp_output_dir / "circuit.json").read_text())
        assert data["noise"] == "ibm-torino"
        manifest = json.loads((temp_output_dir / "manifest.json").read_text())
        assert manifest["config"]["setting"]["kind"] == "benchmark"
        assert manifest["config"]["circuit"]["noise"] == "table4-ibm"

    def test_bench(self, temp_output_dir: Path) -> None:
        """Test that the bench table mixes computed and reference rows."""
        argv = ["bench", "--shots", "exact", "--trotter", "2", "--trajectories", "2", "-q"]
        assert main([*argv, "--out", str(temp_output_dir)]) == 0
        data = json.loads((temp_output_dir / "bench.json").read_text())
        labels = {(r["label"], r["quantity"], r["source"]) for r in data["rows"]}
        assert ("theory", "N_AS", "computed") in labels
        assert ("circuit (noiseless)", "RMSE", "computed") in labels
        assert ("circuit (ibm-torino)", "N_AS", "computed") in labels
        assert ("ibm-expt", "RMSE", "reference") in labels


class TestErrors:
    """Tests for error reporting and exit codes."""

    def test_invalid_value(self, temp_output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that an invalid value prints one config error line."""
        assert main(["exact", "--omega=-1", "--out", str(temp_output_dir), "-q"]) == 2
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        assert err[0].startswith("error[config]:")
        assert "omega" in err[0]

    def test_missing_config(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a missing config file exits with the config status."""
        assert main(["exact", "--config", str(tmp_path / "nope.json"), "-q"]) == 2
        assert capsys.readouterr().err.startswith("error[config]:")

    def test_unsupported_preparation(self, temp_output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that an unpreparable setting exits with the preparation status."""
        argv = ["circuit", "--setting", "random", "--tau", "0", "--shots", "exact", "-q"]
        assert main([*argv, "--out", str(temp_output_dir)]) == 3
        assert capsys.readouterr().err.startswith("error[preparation]:")

    def test_unwritable_output(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that an unwritable output path exits with the output status."""
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        assert main(["exact", "--tau", "0", "--out", str(blocker / "sub"), "-q"]) == 5
        assert capsys.readouterr().err.startswith("error[output]:")

    def test_single_omega_outside_sweep(self, temp_output_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that only sweep accepts an Ω grid."""
        assert main(["exact", "--omega", "0,1", "--out", str(temp_output_dir), "-q"]) == 2
        assert "single value" in capsys.readouterr().err

    def test_sweep_needs_two_environment_qubits(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a sweep on a one-qubit environment fails with a single setting error line."""
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"command": "sweep", "model": {"couplings": [1.0]}}))
        argv = ["sweep", "--config", str(config), "--settings", "4", "--workers", "2", "-q"]
        assert main([*argv, "--out", str(tmp_path / "out")]) == 3
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        assert err[0].startswith("error[setting]:")

    @pytest.mark.parametrize(
        "argv",
        [
            ["exact", "--shots", "many"],
            ["exact", "--noise", "bogus"],
            ["exact", "--bogus-flag"],
            ["frobnicate"],
        ],
    )
    def test_usage_errors(self, argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
        """Test that argument errors print one config error line instead of a usage block."""
        assert main(argv) == 2
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        assert err[0].startswith("error[config]:")
        assert "usage:" not in err[0]
