#!/usr/bin/env python3
"""Training-set-size study: refit on nested subsets of the training split
and tabulate the validation reduction per size."""
import argparse
import json
from pathlib import Path

from noisefit.benchmarks import FamilySpec
from noisefit.harness import ExperimentConfig, SynthSpec, cmd_data_efficiency, cmd_synth


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/data_efficiency")
    ap.add_argument("--sizes", default="9,12,15,18")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    root = Path(args.out)
    synth = SynthSpec(
        num_qubits=9,
        families=(FamilySpec(family="qaoa", sizes=(4, 5, 6, 7, 8, 9), instances=6),),
        shots=30000,
        seed=2,
    )
    ds_dir = cmd_synth(ExperimentConfig(output=str(root / "dataset"), synth=synth))
    cfg = ExperimentConfig(
        dataset=str(ds_dir),
        output=str(root / "fits"),
        method="tpe",
        seed=args.seed,
        trials=args.trials,
    )
    rows = cmd_data_efficiency(cfg, sizes=[int(s) for s in args.sizes.split(",")])
    print(json.dumps(rows, indent=1))


if __name__ == "__main__":
    main()
