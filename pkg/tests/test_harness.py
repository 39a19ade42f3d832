import json
import subprocess
import sys
from pathlib import Path

import pytest

import noisefit.harness as harness
from noisefit.benchmarks import FamilySpec, demo_calibration, synth_experiment
from noisefit.channels import NoiseParams
from noisefit.harness import (
    ConfigError,
    ExperimentConfig,
    SynthSpec,
    cmd_data_efficiency,
    cmd_evaluate,
    cmd_fit,
    cmd_gen,
    cmd_report,
    cmd_synth,
    config_from_doc,
    load_dataset,
    load_report,
    write_dataset,
)


def tiny_synth_spec(shots=2000):
    return SynthSpec(
        num_qubits=7,
        device_seed=7,
        families=(FamilySpec(family="qaoa", sizes=(4, 7), instances=2),),
        shots=shots,
        seed=3,
    )


@pytest.fixture(scope="module")
def tiny_dataset_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("ds")
    cfg = ExperimentConfig(output=str(out / "data"), synth=tiny_synth_spec())
    return cmd_synth(cfg)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.method == "tpe" and cfg.trials == 200

    def test_from_doc_round_trip(self):
        doc = {
            "dataset": "d",
            "method": "rs",
            "seed": 4,
            "trials": 10,
            "bounds": {"k_dep": [0, 5]},
            "synth": {"num_qubits": 5, "families": [{"family": "qaoa", "sizes": [4]}]},
        }
        cfg = config_from_doc(doc)
        assert cfg.method == "rs" and cfg.bounds["k_dep"] == (0.0, 5.0)
        assert cfg.synth.num_qubits == 5

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            config_from_doc({"no_such": 1})

    def test_bad_method_rejected(self):
        with pytest.raises(ConfigError, match="method"):
            ExperimentConfig(method="annealing")


class TestDatasetIO:
    def test_write_load_round_trip(self, tmp_path):
        spec = tiny_synth_spec(shots=500)
        cal = demo_calibration(spec.num_qubits, seed=spec.device_seed)
        ds = synth_experiment(list(spec.families), cal, spec.hidden, spec.shots, spec.seed)
        write_dataset(ds, tmp_path / "data", seed=spec.seed)
        loaded = load_dataset(tmp_path / "data")
        assert loaded.calibration == cal
        assert [e.circuit for e in loaded.entries] == list(ds.circuits)
        assert [e.observed for e in loaded.entries] == list(ds.observed)
        assert [e.split for e in loaded.entries] == list(ds.splits)

    def test_exact_mode_round_trip(self, tmp_path):
        spec = tiny_synth_spec(shots=None)
        cal = demo_calibration(spec.num_qubits, seed=spec.device_seed)
        ds = synth_experiment(list(spec.families), cal, spec.hidden, None, spec.seed)
        write_dataset(ds, tmp_path / "data", seed=spec.seed)
        loaded = load_dataset(tmp_path / "data")
        for entry, original in zip(loaded.entries, ds.observed):
            assert entry.observed.probs == pytest.approx(original.probs, abs=1e-15)

    def test_hidden_params_sealed_in_separate_file(self, tiny_dataset_dir):
        manifest = json.loads((tiny_dataset_dir / "manifest.json").read_text())
        assert "hidden" not in json.dumps(manifest).lower()
        hidden = json.loads((tiny_dataset_dir / "hidden_params.json").read_text())
        assert set(hidden) == set(NoiseParams.field_names())


def small_fit_config(dataset_dir: Path, out: Path, trials=8, seed=5) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=str(dataset_dir), output=str(out), method="tpe", seed=seed, trials=trials
    )


class TestFit:
    def test_fit_produces_report_and_files(self, tiny_dataset_dir, tmp_path):
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "out")
        report = cmd_fit(cfg)
        assert len(report.best_so_far_curve) == cfg.trials
        assert report.train_fitted.mean <= report.train_default.mean * 1.5
        out = tmp_path / "out"
        for name in ("fit_report.json", "study.jsonl", "convergence.csv", "per_circuit.csv"):
            assert (out / name).exists()
        loaded = load_report(out / "fit_report.json")
        assert loaded.best_params == report.best_params

    def test_identical_runs_bit_identical_reports(self, tiny_dataset_dir, tmp_path):
        cfg_a = small_fit_config(tiny_dataset_dir, tmp_path / "a")
        cfg_b = small_fit_config(tiny_dataset_dir, tmp_path / "b")
        cmd_fit(cfg_a)
        cmd_fit(cfg_b)
        assert (tmp_path / "a" / "fit_report.json").read_bytes() == (
            tmp_path / "b" / "fit_report.json"
        ).read_bytes()

    def test_rs_single_trial(self, tiny_dataset_dir, tmp_path):
        cfg = ExperimentConfig(
            dataset=str(tiny_dataset_dir), output=str(tmp_path / "o"), method="rs", trials=1
        )
        report = cmd_fit(cfg)
        assert len(report.best_so_far_curve) == 1
        assert report.best_value == report.best_so_far_curve[0][1]

    def test_study_never_sees_validation_counts(self, tiny_dataset_dir, tmp_path, monkeypatch):
        dataset = load_dataset(tiny_dataset_dir)
        validate_names = {e.circuit.name for e in dataset.entries if e.split == "validate"}
        calls: list[set] = []
        real = harness.mean_objective

        def spy(params, pairs, cal, qubit_cap):
            calls.append({c.name for c, _ in pairs})
            return real(params, pairs, cal, qubit_cap=qubit_cap)

        monkeypatch.setattr(harness, "mean_objective", spy)
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "spy", trials=6)
        cmd_fit(cfg)
        study_calls = calls[: cfg.trials]
        assert len(study_calls) == cfg.trials
        for names in study_calls:
            assert not (names & validate_names)
        # the final evaluation does touch the validation split
        assert any(names & validate_names for names in calls[cfg.trials :])

    def test_resume_matches_uninterrupted(self, tiny_dataset_dir, tmp_path):
        full_cfg = small_fit_config(tiny_dataset_dir, tmp_path / "full", trials=8)
        full = cmd_fit(full_cfg)
        part_cfg = small_fit_config(tiny_dataset_dir, tmp_path / "part", trials=4)
        cmd_fit(part_cfg)
        resumed_cfg = ExperimentConfig(
            dataset=str(tiny_dataset_dir),
            output=str(tmp_path / "part"),
            method="tpe",
            seed=5,
            trials=8,
            resume=True,
        )
        resumed = cmd_fit(resumed_cfg)
        assert resumed.best_value == full.best_value
        assert resumed.best_params == full.best_params

    def test_synth_rejects_sizes_beyond_device(self, tmp_path):
        spec = SynthSpec(
            num_qubits=5,
            families=(FamilySpec(family="qaoa", sizes=(4, 7), instances=1),),
            shots=10,
        )
        with pytest.raises(ConfigError, match="exceed"):
            cmd_synth(ExperimentConfig(output=str(tmp_path / "x"), synth=spec))

    def test_missing_train_split_rejected(self, tmp_path):
        spec = SynthSpec(
            num_qubits=7,
            families=(FamilySpec(family="qaoa", sizes=(7,), instances=1),),
            shots=100,
            seed=0,
        )
        out = cmd_synth(ExperimentConfig(output=str(tmp_path / "v"), synth=spec))
        with pytest.raises(ConfigError, match="training"):
            cmd_fit(small_fit_config(out, tmp_path / "o"))


class TestEvaluate:
    def test_hidden_params_on_exact_dataset_is_zero(self, tmp_path):
        cfg = ExperimentConfig(output=str(tmp_path / "ds"), synth=tiny_synth_spec(shots=None))
        out = cmd_synth(cfg)
        report = cmd_evaluate(out / "hidden_params.json", out)
        assert report.mean < 1e-12

    def test_perturbed_params_strictly_worse(self, tmp_path):
        cfg = ExperimentConfig(output=str(tmp_path / "ds"), synth=tiny_synth_spec(shots=None))
        out = cmd_synth(cfg)
        hidden = json.loads((out / "hidden_params.json").read_text())
        perturbed = dict(hidden)
        perturbed["k_dep_2q"] = hidden["k_dep_2q"] + 2.0
        (tmp_path / "perturbed.json").write_text(json.dumps(perturbed))
        base = cmd_evaluate(out / "hidden_params.json", out)
        worse = cmd_evaluate(tmp_path / "perturbed.json", out)
        assert worse.mean > base.mean

    def test_split_filter(self, tiny_dataset_dir):
        report = cmd_evaluate(
            tiny_dataset_dir / "hidden_params.json", tiny_dataset_dir, split="train"
        )
        names = [n for n, _ in report.per_circuit]
        assert all("n4" in n for n in names)

    def test_missing_field_rejected(self, tiny_dataset_dir, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"k_dep": 1.0}))
        with pytest.raises(Exception, match="missing"):
            cmd_evaluate(bad, tiny_dataset_dir)


class TestDataEfficiency:
    def test_rows_and_full_size_match_fit(self, tiny_dataset_dir, tmp_path):
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "de", trials=6)
        rows = cmd_data_efficiency(cfg, sizes=[1, 2])
        assert len(rows) == 2
        assert (tmp_path / "de" / "data_efficiency.csv").exists()
        full_fit = cmd_fit(small_fit_config(tiny_dataset_dir, tmp_path / "fit", trials=6))
        assert rows[-1]["best_value"] == full_fit.best_value

    def test_oversized_subset_rejected(self, tiny_dataset_dir, tmp_path):
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "de2", trials=2)
        with pytest.raises(ConfigError, match="exceeds"):
            cmd_data_efficiency(cfg, sizes=[99])


class TestReportRendering:
    def test_report_files(self, tiny_dataset_dir, tmp_path):
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "fit2", trials=4)
        report = cmd_fit(cfg)
        out = cmd_report(tmp_path / "fit2" / "fit_report.json", tmp_path / "rep")
        scatter = (out / "scatter.csv").read_text().strip().splitlines()
        n_circuits = len(report.train_fitted.per_circuit) + len(
            report.validate_fitted.per_circuit
        )
        assert len(scatter) == n_circuits + 1  # header
        assert all(line.split(",")[1] in ("train", "validate", "split") for line in scatter)
        summary = (out / "summary.md").read_text()
        assert f"{report.reduction_train:.1f}" in summary

    def test_reductions_recompute_from_embedded_reports(self, tiny_dataset_dir, tmp_path):
        cfg = small_fit_config(tiny_dataset_dir, tmp_path / "fit3", trials=4)
        report = cmd_fit(cfg)
        loaded = load_report(tmp_path / "fit3" / "fit_report.json")
        expected = 100.0 * (1.0 - loaded.train_fitted.mean / loaded.train_default.mean)
        assert abs(loaded.reduction_train - expected) < 1e-9
        assert loaded.reduction_train == pytest.approx(report.reduction_train, abs=1e-9)


class TestGen:
    def test_gen_writes_circuits_and_manifest(self, tmp_path):
        out = cmd_gen("qaoa", sizes=[4, 5], instances=2, seed=1, out_dir=tmp_path / "gen")
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["entries"]) == 4
        for entry in manifest["entries"]:
            assert (out / entry["circuit"]).exists()
            assert entry["split"] == "train"


class TestCli:
    def run_cli(self, *argv):
        from noisefit.cli import main

        return main(list(argv))

    def test_synth_fit_evaluate_report_pipeline(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "trials": 4,
                    "seed": 1,
                    "synth": {
                        "num_qubits": 7,
                        "families": [{"family": "qaoa", "sizes": [4, 7], "instances": 1}],
                        "shots": 500,
                        "seed": 2,
                    },
                }
            )
        )
        ds = tmp_path / "ds"
        assert self.run_cli("synth", "--config", str(cfg_path), "--output", str(ds)) == 0
        out = tmp_path / "out"
        code = self.run_cli(
            "fit", "--config", str(cfg_path), "--dataset", str(ds), "--output", str(out)
        )
        assert code == 0
        assert (out / "fit_report.json").exists()
        code = self.run_cli(
            "evaluate", "--params", str(ds / "hidden_params.json"), "--dataset", str(ds)
        )
        assert code == 0
        code = self.run_cli(
            "report", "--report", str(out / "fit_report.json"), "--output", str(tmp_path / "r")
        )
        assert code == 0
        assert (tmp_path / "r" / "summary.md").exists()

    def test_error_is_machine_readable_json(self, tmp_path, capsys):
        code = self.run_cli("fit", "--dataset", str(tmp_path / "missing"))
        assert code == 1
        err = capsys.readouterr().err.strip().splitlines()[-1]
        payload = json.loads(err)
        assert "error" in payload and "message" in payload

    def test_gen_cli(self, tmp_path):
        code = self.run_cli(
            "gen", "--family", "random", "--sizes", "4", "--instances", "1",
            "--seed", "3", "--output", str(tmp_path / "g"),
        )
        assert code == 0

    def test_console_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "noisefit.cli", "gen", "--family", "qaoa",
             "--sizes", "4", "--instances", "1", "--seed", "0",
             "--output", str(tmp_path / "gg")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
