"""Command-line entry point.

Subcommands: ``fit``, ``evaluate``, ``synth``, ``gen``, ``data-efficiency``,
``report``. Configuration comes from one JSON (or, on Python 3.11+, TOML)
file plus flag overrides; flags win. Exits 0 on success and nonzero with a
machine-readable JSON error on stderr otherwise.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import harness
from .harness import ExperimentConfig, load_config


def _merged_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    overrides = {}
    for name in ("dataset", "output", "method", "seed", "trials", "qubit_cap"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "resume", False):
        overrides["resume"] = True
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON/TOML experiment config")
    parser.add_argument("--dataset", help="dataset directory")
    parser.add_argument("--output", help="output directory")
    parser.add_argument("--method", choices=["tpe", "rs"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--qubit-cap", dest="qubit_cap", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisefit",
        description="Fit parameterized quantum noise models to measured outcome distributions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit noise parameters on a dataset's training split")
    _add_common(p_fit)
    p_fit.add_argument("--resume", action="store_true", help="continue a saved study")

    p_eval = sub.add_parser("evaluate", help="objective of a parameter file on a dataset")
    p_eval.add_argument("--params", required=True, help="noise-parameter JSON (20 fields)")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--split", choices=["train", "validate"])
    p_eval.add_argument("--qubit-cap", dest="qubit_cap", type=int, default=None)
    p_eval.add_argument("--output", help="write the report JSON here")
    p_eval.add_argument("--output-csv", dest="output_csv", help="write circuit,d_h rows here")

    p_synth = sub.add_parser("synth", help="generate a synthetic ground-truth dataset")
    _add_common(p_synth)
    p_synth.add_argument("--shots", type=int, help="override shot count")
    p_synth.add_argument("--num-qubits", dest="num_qubits", type=int)
    p_synth.add_argument("--synth-seed", dest="synth_seed", type=int)

    p_gen = sub.add_parser("gen", help="emit benchmark circuit files")
    p_gen.add_argument("--family", required=True, choices=["qaoa", "hweff", "random"])
    p_gen.add_argument("--sizes", required=True, help="comma-separated qubit counts")
    p_gen.add_argument("--instances", type=int, default=4)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--layers", type=int, default=1)
    p_gen.add_argument("--reps", type=int, default=1)
    p_gen.add_argument("--entangler", choices=["cx", "cz"], default="cx")
    p_gen.add_argument("--output", required=True)

    p_de = sub.add_parser("data-efficiency", help="refit on nested training subsets")
    _add_common(p_de)
    p_de.add_argument("--sizes", default="9,12,15,18", help="comma-separated subset sizes")

    p_rep = sub.add_parser("report", help="render CSV/Markdown artifacts from a fit report")
    p_rep.add_argument("--report", required=True, help="fit_report.json path")
    p_rep.add_argument("--output", required=True)

    return parser


def _run(args: argparse.Namespace) -> None:
    if args.command == "fit":
        report = harness.cmd_fit(_merged_config(args))
        line = {
            "best_value": report.best_value,
            "reduction_train": report.reduction_train,
            "reduction_validate": report.reduction_validate,
        }
        print(json.dumps(line))
    elif args.command == "evaluate":
        report = harness.cmd_evaluate(
            args.params,
            args.dataset,
            split=args.split,
            qubit_cap=args.qubit_cap or harness.DEFAULT_QUBIT_CAP,
        )
        doc = {"mean": report.mean, "per_circuit": [[n, v] for n, v in report.per_circuit]}
        if args.output:
            Path(args.output).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        if args.output_csv:
            harness.write_objective_csv(report, args.output_csv)
        print(json.dumps({"mean": report.mean}))
    elif args.command == "synth":
        cfg = _merged_config(args)
        spec = cfg.synth
        updates = {}
        if args.shots is not None:
            updates["shots"] = args.shots
        if args.num_qubits is not None:
            updates["num_qubits"] = args.num_qubits
        if args.synth_seed is not None:
            updates["seed"] = args.synth_seed
        if updates:
            cfg = dataclasses.replace(cfg, synth=dataclasses.replace(spec, **updates))
        out = harness.cmd_synth(cfg)
        print(json.dumps({"dataset": str(out)}))
    elif args.command == "gen":
        sizes = [int(s) for s in args.sizes.split(",") if s]
        out = harness.cmd_gen(
            args.family,
            sizes,
            instances=args.instances,
            seed=args.seed,
            out_dir=args.output,
            layers=args.layers,
            reps=args.reps,
            entangler=args.entangler,
        )
        print(json.dumps({"output": str(out)}))
    elif args.command == "data-efficiency":
        sizes = [int(s) for s in args.sizes.split(",") if s]
        rows = harness.cmd_data_efficiency(_merged_config(args), sizes)
        print(json.dumps(rows))
    elif args.command == "report":
        out = harness.cmd_report(args.report, args.output)
        print(json.dumps({"output": str(out)}))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        payload = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
