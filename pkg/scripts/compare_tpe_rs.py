#!/usr/bin/env python3
"""TPE-vs-random-search comparison on one synthetic dataset: run both
methods over several seeds and write the convergence curves."""
import argparse
import csv
import json
from pathlib import Path

import numpy as np

from noisefit.benchmarks import FamilySpec, demo_calibration, demo_hidden_params, synth_experiment
from noisefit.channels import NoiseParams
from noisefit.metrics import mean_objective
from noisefit.optimize import default_search_space, run_study


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/tpe_vs_rs")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seeds", default="101,102,103,104,105")
    args = ap.parse_args()

    cal = demo_calibration(9, seed=7)
    hidden = demo_hidden_params()
    ds = synth_experiment(
        [FamilySpec(family="qaoa", sizes=(4, 5, 6), instances=4)], cal, hidden, 30000, seed=0
    )
    train = ds.pairs("train")
    space = default_search_space()

    def objective(point):
        return mean_objective(NoiseParams.from_dict(point), train, cal).mean

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]
    summary = {}
    with open(out / "curves.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "seed", "trial", "best_value"])
        for method in ("tpe", "rs"):
            bests = []
            for seed in seeds:
                study = run_study(objective, space, args.trials, method=method, seed=seed)
                bests.append(study.best_trial.value)
                for index, value in study.best_so_far():
                    writer.writerow([method, seed, index, value])
            summary[method] = {"bests": bests, "median": float(np.median(bests))}
    print(json.dumps(summary, indent=1))


if __name__ == "__main__":
    main()
