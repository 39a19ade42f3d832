"""End-to-end experiment driver: dataset files, fitting, evaluation, reports.

A dataset directory holds ``manifest.json``, ``calibration.json``,
``circuits/*.json`` and ``counts/*.json``. Synthetic datasets additionally
carry ``hidden_params.json`` for audits; the fitting path never reads it.
Observations are either sampled counts ``{shots, counts}`` or exact
distributions ``{shots: null, probs}`` (infinite-shot mode).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .benchmarks import FamilySpec, SyntheticDataset, demo_calibration, demo_hidden_params, synth_experiment
from .calibration import DeviceCalibration, load_calibration, save_calibration
from .channels import NoiseParams, build_parameterized_model
from .circuits import Circuit, SchemaError, load_circuits, save_circuits
from .metrics import ObjectiveReport, default_model_objective, mean_objective
from .optimize import (
    Study,
    TpeConfig,
    default_search_space,
    load_study,
    run_study,
    save_study,
)
from .simulator import DEFAULT_QUBIT_CAP, Counts, ProbDist, counts_from_doc, counts_to_doc


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    num_qubits: int = 9
    device_seed: int = 7
    families: tuple[FamilySpec, ...] = (
        FamilySpec(family="qaoa", sizes=(4, 5, 6, 7, 8, 9), instances=4),
    )
    shots: int | None = 30000
    seed: int = 0
    hidden: NoiseParams = field(default_factory=demo_hidden_params)
    calibration_path: str | None = None  # overrides the generated device


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | None = None
    output: str = "out"
    method: str = "tpe"
    seed: int = 0
    trials: int = 200
    qubit_cap: int = DEFAULT_QUBIT_CAP
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    tpe: TpeConfig = TpeConfig()
    resume: bool = False
    synth: SynthSpec = SynthSpec()

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.method not in ("tpe", "rs"):
            raise ConfigError(f"unknown method {self.method!r}")


def _family_from_doc(doc: Mapping[str, Any]) -> FamilySpec:
    kwargs = dict(doc)
    kwargs["sizes"] = tuple(int(n) for n in kwargs.get("sizes", ()))
    return FamilySpec(**kwargs)


def config_from_doc(doc: Mapping[str, Any]) -> ExperimentConfig:
    known = {
        "dataset",
        "output",
        "method",
        "seed",
        "trials",
        "qubit_cap",
        "bounds",
        "tpe",
        "resume",
        "synth",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    kwargs: dict[str, Any] = {k: doc[k] for k in known & set(doc)}
    if "bounds" in kwargs:
        kwargs["bounds"] = {
            name: (float(lo), float(hi)) for name, (lo, hi) in kwargs["bounds"].items()
        }
    if "tpe" in kwargs:
        kwargs["tpe"] = TpeConfig(**kwargs["tpe"])
    if "synth" in kwargs:
        raw = dict(kwargs["synth"])
        if "families" in raw:
            raw["families"] = tuple(_family_from_doc(f) for f in raw["families"])
        hidden = raw.pop("hidden_params", "demo")
        raw["hidden"] = (
            demo_hidden_params() if hidden == "demo" else NoiseParams.from_dict(hidden)
        )
        kwargs["synth"] = SynthSpec(**raw)
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError as exc:  # Python 3.10
            raise ConfigError(
                "TOML configs need Python 3.11+; use a JSON config instead"
            ) from exc
        doc = tomllib.loads(text)
    else:
        doc = json.loads(text)
    return config_from_doc(doc)


# --- dataset files ------------------------------------------------------------


@dataclass(frozen=True)
class DatasetEntry:
    circuit: Circuit
    observed: Counts | ProbDist
    split: str


@dataclass(frozen=True)
class Dataset:
    calibration: DeviceCalibration
    entries: tuple[DatasetEntry, ...]

    def pairs(self, split: str | None = None) -> list[tuple[Circuit, Counts | ProbDist]]:
        return [
            (e.circuit, e.observed)
            for e in self.entries
            if split is None or e.split == split
        ]

    def subset(self, names: Sequence[str]) -> "Dataset":
        wanted = set(names)
        return Dataset(
            calibration=self.calibration,
            entries=tuple(e for e in self.entries if e.circuit.name in wanted),
        )


def _observed_to_doc(observed: Counts | ProbDist) -> dict[str, Any]:
    if isinstance(observed, Counts):
        return counts_to_doc(observed)
    return {"shots": None, "probs": observed.as_table()}


def _observed_from_doc(doc: Mapping[str, Any], qubits: tuple[int, ...]) -> Counts | ProbDist:
    if doc.get("shots") is None:
        probs = np.zeros(2 ** len(qubits))
        for bits, p in doc["probs"].items():
            probs[int(bits, 2)] = float(p)
        return ProbDist(probs=probs, qubits=qubits)
    return counts_from_doc(doc)


def write_dataset(ds: SyntheticDataset, out_dir: str | Path, seed: int) -> Path:
    out = Path(out_dir)
    (out / "circuits").mkdir(parents=True, exist_ok=True)
    (out / "counts").mkdir(parents=True, exist_ok=True)
    save_calibration(ds.calibration, out / "calibration.json")
    entries = []
    for circuit, observed, split in zip(ds.circuits, ds.observed, ds.splits):
        save_circuits([circuit], out / "circuits" / f"{circuit.name}.json")
        with open(out / "counts" / f"{circuit.name}.json", "w", encoding="utf-8") as fh:
            json.dump(_observed_to_doc(observed), fh)
        entries.append(
            {
                "name": circuit.name,
                "split": split,
                "family": circuit.meta.get("family", ""),
                "num_qubits": circuit.num_qubits,
                "circuit": f"circuits/{circuit.name}.json",
                "counts": f"counts/{circuit.name}.json",
            }
        )
    manifest = {
        "seed": seed,
        "shots": ds.shots,
        "calibration": "calibration.json",
        "entries": entries,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
    # sealed away from the fitting inputs; kept for audits and evaluation
    with open(out / "hidden_params.json", "w", encoding="utf-8") as fh:
        json.dump(ds.hidden_params.to_dict(), fh, indent=1, sort_keys=True)
    return out


def load_dataset(path: str | Path) -> Dataset:
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"no manifest.json under {root}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    cal = load_calibration(root / manifest["calibration"])
    entries = []
    for entry in manifest["entries"]:
        circuits = load_circuits(root / entry["circuit"])
        if len(circuits) != 1:
            raise SchemaError(f"{entry['circuit']} must hold exactly one circuit")
        circuit = circuits[0]
        doc = json.loads((root / entry["counts"]).read_text(encoding="utf-8"))
        observed = _observed_from_doc(doc, circuit.measured_qubits)
        entries.append(DatasetEntry(circuit=circuit, observed=observed, split=entry["split"]))
    return Dataset(calibration=cal, entries=tuple(entries))


# --- fit and evaluation -------------------------------------------------------


@dataclass(frozen=True)
class FitReport:
    method: str
    seed: int
    n_trials: int
    best_params: NoiseParams
    best_value: float
    train_fitted: ObjectiveReport
    train_default: ObjectiveReport
    validate_fitted: ObjectiveReport | None
    validate_default: ObjectiveReport | None
    best_so_far_curve: tuple[tuple[int, float | None], ...]
    clamp_event_totals: Mapping[str, int]

    @property
    def reduction_train(self) -> float:
        return 100.0 * (1.0 - self.train_fitted.mean / self.train_default.mean)

    @property
    def reduction_validate(self) -> float | None:
        if self.validate_fitted is None or self.validate_default is None:
            return None
        return 100.0 * (1.0 - self.validate_fitted.mean / self.validate_default.mean)


def _report_to_doc(report: FitReport) -> dict[str, Any]:
    def obj(r: ObjectiveReport | None) -> Any:
        if r is None:
            return None
        return {"per_circuit": [[n, v] for n, v in r.per_circuit], "mean": r.mean}

    return {
        "method": report.method,
        "seed": report.seed,
        "n_trials": report.n_trials,
        "best_params": report.best_params.to_dict(),
        "best_value": report.best_value,
        "train": {"fitted": obj(report.train_fitted), "default": obj(report.train_default)},
        "validate": {
            "fitted": obj(report.validate_fitted),
            "default": obj(report.validate_default),
        },
        "reduction_train": report.reduction_train,
        "reduction_validate": report.reduction_validate,
        "best_so_far_curve": [[i, v] for i, v in report.best_so_far_curve],
        "clamp_event_totals": dict(sorted(report.clamp_event_totals.items())),
    }


def report_from_doc(doc: Mapping[str, Any]) -> FitReport:
    def obj(raw: Any) -> ObjectiveReport | None:
        if raw is None:
            return None
        return ObjectiveReport(
            per_circuit=tuple((n, float(v)) for n, v in raw["per_circuit"]),
            mean=float(raw["mean"]),
        )

    return FitReport(
        method=doc["method"],
        seed=int(doc["seed"]),
        n_trials=int(doc["n_trials"]),
        best_params=NoiseParams.from_dict(doc["best_params"]),
        best_value=float(doc["best_value"]),
        train_fitted=obj(doc["train"]["fitted"]),
        train_default=obj(doc["train"]["default"]),
        validate_fitted=obj(doc["validate"]["fitted"]),
        validate_default=obj(doc["validate"]["default"]),
        best_so_far_curve=tuple(
            (int(i), None if v is None else float(v)) for i, v in doc["best_so_far_curve"]
        ),
        clamp_event_totals=dict(doc["clamp_event_totals"]),
    )


def save_report(report: FitReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_report_to_doc(report), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_report(path: str | Path) -> FitReport:
    return report_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))


def _clamp_totals(params: NoiseParams, dataset: Dataset) -> dict[str, int]:
    totals: dict[str, int] = {}
    seen: set[tuple[int, ...]] = set()
    for circuit, _ in dataset.pairs():
        key = circuit.measured_qubits
        if key in seen:
            continue
        seen.add(key)
        model = build_parameterized_model(params, dataset.calibration, key)
        for name, count in model.clamp_events.items():
            totals[name] = totals.get(name, 0) + count
    return totals


def fit_dataset(
    cfg: ExperimentConfig, dataset: Dataset, out_dir: Path | None = None
) -> tuple[FitReport, Study]:
    """Run the optimizer on the training split and evaluate both splits.

    Only training circuits enter the study objective; validation counts are
    touched exclusively by the final evaluation.
    """
    train = dataset.pairs("train")
    if not train:
        raise ConfigError("dataset has no training circuits")
    validate = dataset.pairs("validate")
    cal = dataset.calibration
    space = default_search_space(cfg.bounds)

    def objective(point: dict[str, float]) -> float:
        return mean_objective(
            NoiseParams.from_dict(point), train, cal, qubit_cap=cfg.qubit_cap
        ).mean

    resume_study = None
    study_path = out_dir / "study.jsonl" if out_dir is not None else None
    if cfg.resume and study_path is not None and study_path.exists():
        resume_study = load_study(study_path)
    study = run_study(
        objective,
        space,
        n_trials=cfg.trials,
        method=cfg.method,
        seed=cfg.seed,
        tpe_config=cfg.tpe,
        resume=resume_study,
    )
    best = NoiseParams.from_dict(study.best_trial.params)
    train_fitted = mean_objective(best, train, cal, qubit_cap=cfg.qubit_cap)
    train_default = default_model_objective(train, cal, qubit_cap=cfg.qubit_cap)
    validate_fitted = (
        mean_objective(best, validate, cal, qubit_cap=cfg.qubit_cap) if validate else None
    )
    validate_default = (
        default_model_objective(validate, cal, qubit_cap=cfg.qubit_cap) if validate else None
    )
    report = FitReport(
        method=cfg.method,
        seed=cfg.seed,
        n_trials=cfg.trials,
        best_params=best,
        best_value=float(study.best_trial.value),
        train_fitted=train_fitted,
        train_default=train_default,
        validate_fitted=validate_fitted,
        validate_default=validate_default,
        best_so_far_curve=tuple(study.best_so_far()),
        clamp_event_totals=_clamp_totals(best, dataset),
    )
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        save_study(study, out_dir / "study.jsonl")
        save_report(report, out_dir / "fit_report.json")
        _write_curve_csv(report, out_dir / "convergence.csv")
        _write_scatter_csv(report, out_dir / "per_circuit.csv")
    return report, study


def cmd_fit(cfg: ExperimentConfig) -> FitReport:
    if not cfg.dataset:
        raise ConfigError("fit needs a dataset path")
    dataset = load_dataset(cfg.dataset)
    report, _ = fit_dataset(cfg, dataset, out_dir=Path(cfg.output))
    return report


def cmd_evaluate(
    params_path: str | Path,
    dataset_path: str | Path,
    split: str | None = None,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> ObjectiveReport:
    params = NoiseParams.from_dict(
        json.loads(Path(params_path).read_text(encoding="utf-8"))
    )
    dataset = load_dataset(dataset_path)
    pairs = dataset.pairs(split)
    if not pairs:
        raise ConfigError(f"dataset has no circuits for split {split!r}")
    return mean_objective(params, pairs, dataset.calibration, qubit_cap=qubit_cap)


def cmd_synth(cfg: ExperimentConfig) -> Path:
    spec = cfg.synth
    cal = (
        load_calibration(spec.calibration_path)
        if spec.calibration_path
        else demo_calibration(spec.num_qubits, seed=spec.device_seed)
    )
    oversized = sorted(
        {n for fam in spec.families for n in fam.sizes if n > cal.num_qubits}
    )
    if oversized:
        raise ConfigError(
            f"family sizes {oversized} exceed the {cal.num_qubits}-qubit device; "
            "shrink the sizes or enlarge the device"
        )
    ds = synth_experiment(list(spec.families), cal, spec.hidden, spec.shots, spec.seed)
    return write_dataset(ds, cfg.output, seed=spec.seed)


def cmd_gen(
    family: str,
    sizes: Sequence[int],
    instances: int,
    seed: int,
    out_dir: str | Path,
    layers: int = 1,
    reps: int = 1,
    entangler: str = "cx",
) -> Path:
    """Emit circuit JSON files plus a manifest (no observations)."""
    from .benchmarks import _family_circuits

    spec = FamilySpec(
        family=family,
        sizes=tuple(sizes),
        instances=instances,
        layers=layers,
        reps=reps,
        entangler=entangler,
    )
    cal = demo_calibration(max(sizes), seed=seed)
    circuits = _family_circuits(spec, seed, 0, cal)
    out = Path(out_dir)
    (out / "circuits").mkdir(parents=True, exist_ok=True)
    entries = []
    for c in circuits:
        save_circuits([c], out / "circuits" / f"{c.name}.json")
        entries.append(
            {
                "name": c.name,
                "family": family,
                "num_qubits": c.num_qubits,
                "split": "train" if c.num_qubits <= 6 else "validate",
                "seed": seed,
                "circuit": f"circuits/{c.name}.json",
                "meta": dict(c.meta),
            }
        )
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump({"seed": seed, "entries": entries}, fh, indent=1)
    return out


def _round_robin_by_size(circuits: Sequence[Circuit]) -> list[str]:
    # balanced nesting: interleave qubit counts so every subset spans sizes
    by_size: dict[int, list[str]] = {}
    for c in circuits:
        by_size.setdefault(c.num_qubits, []).append(c.name)
    ordered: list[str] = []
    queues = [by_size[n] for n in sorted(by_size)]
    index = 0
    while any(queues):
        queue = queues[index % len(queues)]
        if queue:
            ordered.append(queue.pop(0))
        index += 1
    return ordered


def cmd_data_efficiency(
    cfg: ExperimentConfig, sizes: Sequence[int]
) -> list[dict[str, Any]]:
    """Refit on nested training subsets and report the reduction per size."""
    if not cfg.dataset:
        raise ConfigError("data-efficiency needs a dataset path")
    dataset = load_dataset(cfg.dataset)
    train_names = _round_robin_by_size(
        [e.circuit for e in dataset.entries if e.split == "train"]
    )
    validate_names = [e.circuit.name for e in dataset.entries if e.split == "validate"]
    rows = []
    for size in sizes:
        if size > len(train_names):
            raise ConfigError(
                f"subset size {size} exceeds the {len(train_names)} training circuits"
            )
        subset = dataset.subset(train_names[:size] + validate_names)
        report, _ = fit_dataset(cfg, subset, out_dir=None)
        rows.append(
            {
                "train_size": size,
                "best_value": report.best_value,
                "reduction_train": report.reduction_train,
                "reduction_validate": report.reduction_validate,
            }
        )
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "data_efficiency.json", "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=1)
    with open(out / "data_efficiency.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["train_size", "best_value", "reduction_train", "reduction_validate"]
        )
        writer.writeheader()
        writer.writerows(rows)
    return rows


def write_objective_csv(report: ObjectiveReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["circuit", "d_h"])
        for name, value in report.per_circuit:
            writer.writerow([name, repr(value)])


def _write_curve_csv(report: FitReport, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "best_value"])
        for index, value in report.best_so_far_curve:
            writer.writerow([index, "" if value is None else repr(value)])


def _write_scatter_csv(report: FitReport, path: Path) -> None:
    fitted = dict(report.train_fitted.per_circuit)
    default = dict(report.train_default.per_circuit)
    split_of = {name: "train" for name in fitted}
    if report.validate_fitted is not None:
        fitted.update(dict(report.validate_fitted.per_circuit))
        default.update(dict(report.validate_default.per_circuit))
        for name, _ in report.validate_fitted.per_circuit:
            split_of[name] = "validate"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["circuit", "split", "default_dh", "fitted_dh"])
        for name in sorted(fitted):
            writer.writerow([name, split_of[name], repr(default[name]), repr(fitted[name])])


def cmd_report(report_path: str | Path, out_dir: str | Path) -> Path:
    """Emit scatter CSV, convergence CSV and a Markdown summary for a fit."""
    report = load_report(report_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_scatter_csv(report, out / "scatter.csv")
    _write_curve_csv(report, out / "convergence.csv")
    lines = [
        "# Noise-model fit summary",
        "",
        f"- method: {report.method}, seed: {report.seed}, trials: {report.n_trials}",
        f"- best training objective: {report.best_value:.6f}",
        f"- clamp events at best parameters: {dict(report.clamp_event_totals)}",
        "",
        "| Split | Default mean D_H | Fitted mean D_H | Reduction (%) |",
        "| --- | --- | --- | --- |",
        (
            f"| train | {report.train_default.mean:.4f} "
            f"| {report.train_fitted.mean:.4f} | {report.reduction_train:.1f} |"
        ),
    ]
    if report.validate_fitted is not None:
        lines.append(
            f"| validate | {report.validate_default.mean:.4f} "
            f"| {report.validate_fitted.mean:.4f} | {report.reduction_validate:.1f} |"
        )
    (out / "summary.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out
