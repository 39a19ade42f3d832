"""Learn parameterized quantum noise models from measured outcome distributions.

The toolkit simulates gate-level circuits under Kraus-channel noise models
built from device calibration data, and fits the model's 20 global
parameters by minimizing the mean Hellinger distance to observed counts
with a tree-structured Parzen estimator (random search as the baseline).
"""

from .calibration import (
    DeviceCalibration,
    EdgeCal,
    PairMatching,
    QubitCal,
    greedy_pair_matching,
    load_calibration,
    parse_calibration,
    pure_dephasing_time,
)
from .channels import (
    KrausChannel,
    NoiseModel,
    NoiseParams,
    ReadoutModel,
    build_default_model,
    build_parameterized_model,
)
from .circuits import Circuit, CircuitStats, GateOp, SchemaError, circuit_stats, parse_circuit
from .metrics import ObjectiveReport, circuit_fidelity_estimate, hellinger, mean_objective
from .optimize import SearchSpace, Study, Trial, default_search_space, run_study
from .simulator import Counts, DensityMatrix, ProbDist, sample_counts, simulate

__all__ = [
    "Circuit",
    "CircuitStats",
    "Counts",
    "DensityMatrix",
    "DeviceCalibration",
    "EdgeCal",
    "GateOp",
    "KrausChannel",
    "NoiseModel",
    "NoiseParams",
    "ObjectiveReport",
    "PairMatching",
    "ProbDist",
    "QubitCal",
    "ReadoutModel",
    "SchemaError",
    "SearchSpace",
    "Study",
    "Trial",
    "build_default_model",
    "build_parameterized_model",
    "circuit_fidelity_estimate",
    "circuit_stats",
    "default_search_space",
    "greedy_pair_matching",
    "hellinger",
    "load_calibration",
    "mean_objective",
    "parse_calibration",
    "parse_circuit",
    "pure_dephasing_time",
    "run_study",
    "sample_counts",
    "simulate",
]
