#!/usr/bin/env python3
"""Full synthetic recovery experiment: synthesize a dataset from a hidden
parameter vector, fit with TPE, and render the report artifacts.

Equivalent to chaining the CLI: synth -> fit -> report.
"""
import argparse
import json
from pathlib import Path

from noisefit.harness import ExperimentConfig, SynthSpec, cmd_fit, cmd_report, cmd_synth
from noisefit.benchmarks import FamilySpec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/synthetic_fit", help="output root")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=101)
    ap.add_argument("--method", choices=["tpe", "rs"], default="tpe")
    ap.add_argument("--shots", type=int, default=30000)
    ap.add_argument("--instances", type=int, default=4, help="circuits per qubit count")
    args = ap.parse_args()

    root = Path(args.out)
    synth = SynthSpec(
        num_qubits=9,
        families=(FamilySpec(family="qaoa", sizes=(4, 5, 6, 7, 8, 9), instances=args.instances),),
        shots=args.shots,
        seed=0,
    )
    ds_dir = cmd_synth(ExperimentConfig(output=str(root / "dataset"), synth=synth))
    print(f"dataset: {ds_dir}")

    cfg = ExperimentConfig(
        dataset=str(ds_dir),
        output=str(root / "fit"),
        method=args.method,
        seed=args.seed,
        trials=args.trials,
    )
    report = cmd_fit(cfg)
    cmd_report(root / "fit" / "fit_report.json", root / "report")
    print(
        json.dumps(
            {
                "best_value": report.best_value,
                "train_default": report.train_default.mean,
                "train_fitted": report.train_fitted.mean,
                "reduction_train_pct": report.reduction_train,
                "validate_default": report.validate_default.mean,
                "validate_fitted": report.validate_fitted.mean,
                "reduction_validate_pct": report.reduction_validate,
            },
            indent=1,
        )
    )


if __name__ == "__main__":
    main()
