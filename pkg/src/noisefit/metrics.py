"""Hellinger distance, the fitting objective, and calibration-based fidelity."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .calibration import DeviceCalibration
from .channels import DefaultModelFamily, NoiseParams, ParameterizedModelFamily
from .circuits import Circuit
from .simulator import DEFAULT_QUBIT_CAP, Counts, ProbDist, simulate

Observed = ProbDist | Counts


def _as_frequencies(dist: Observed) -> np.ndarray:
    if isinstance(dist, ProbDist):
        return np.asarray(dist.probs, dtype=float)
    return dist.frequencies()


def hellinger(p: Observed, q: Observed) -> float:
    """D_H = sqrt(1 - sum_j sqrt(p_j q_j)); symmetric, in [0, 1].

    Computed through the equivalent form ||sqrt(p) - sqrt(q)||_2 / sqrt(2),
    which is exactly zero for identical inputs instead of amplifying
    last-ulp cancellation noise. Counts are normalized to maximum-likelihood
    frequencies first; both inputs must share one outcome space.
    """
    pv = _as_frequencies(p)
    qv = _as_frequencies(q)
    if pv.shape != qv.shape:
        raise ValueError(f"mismatched outcome spaces: {pv.shape} vs {qv.shape}")
    diff = np.sqrt(pv) - np.sqrt(qv)
    half_sq = 0.5 * float(diff @ diff)
    return math.sqrt(min(1.0, half_sq))


@dataclass(frozen=True)
class ObjectiveReport:
    """Per-circuit Hellinger distances (name-sorted) and their mean."""

    per_circuit: tuple[tuple[str, float], ...]
    mean: float

    @classmethod
    def from_values(cls, values: Iterable[tuple[str, float]]) -> "ObjectiveReport":
        ordered = tuple(sorted(values, key=lambda pair: pair[0]))
        if not ordered:
            raise ValueError("objective needs at least one circuit")
        mean = sum(v for _, v in ordered) / len(ordered)
        return cls(per_circuit=ordered, mean=mean)


def _grouped_models(
    params: NoiseParams | None,
    circuits: Sequence[Circuit],
    cal: DeviceCalibration,
):
    """One model per distinct measured-qubit set; gate channels are built
    once and shared (only the readout pairing depends on the measured set)."""
    family = (
        ParameterizedModelFamily(params, cal) if params is not None else DefaultModelFamily(cal)
    )
    models = {}
    for circuit in circuits:
        key = circuit.measured_qubits or tuple(range(circuit.num_qubits))
        if key not in models:
            models[key] = family.model_for(key)
    return models


def _objective(
    params: NoiseParams | None,
    dataset: Sequence[tuple[Circuit, Observed]],
    cal: DeviceCalibration,
    qubit_cap: int,
) -> ObjectiveReport:
    if not dataset:
        raise ValueError("empty dataset")
    circuits = [c for c, _ in dataset]
    names = [c.name for c in circuits]
    if len(set(names)) != len(names):
        raise ValueError("dataset circuit names must be unique")
    models = _grouped_models(params, circuits, cal)
    values = []
    for circuit, observed in sorted(dataset, key=lambda pair: pair[0].name):
        key = circuit.measured_qubits or tuple(range(circuit.num_qubits))
        predicted = simulate(circuit, models[key], qubit_cap=qubit_cap)
        values.append((circuit.name, hellinger(predicted, observed)))
    return ObjectiveReport.from_values(values)


def mean_objective(
    params: NoiseParams,
    dataset: Sequence[tuple[Circuit, Observed]],
    cal: DeviceCalibration,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> ObjectiveReport:
    """Mean Hellinger distance between simulations under ``params`` and the
    observed distributions. Deterministic: circuits are evaluated and
    reduced in sorted-name order."""
    return _objective(params, dataset, cal, qubit_cap)


def default_model_objective(
    dataset: Sequence[tuple[Circuit, Observed]],
    cal: DeviceCalibration,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> ObjectiveReport:
    """Same reduction under the vendor-style default model."""
    return _objective(None, dataset, cal, qubit_cap)


def circuit_fidelity_estimate(circuit: Circuit, cal: DeviceCalibration) -> float:
    """Product of (1 - error) over every non-virtual gate and every measured
    qubit's mean readout error."""
    fidelity = 1.0
    for op in circuit.ops:
        if op.kind == "rz" or op.is_measure:
            continue
        if op.kind in ("cx", "cz"):
            edge = cal.edge_for(*op.qubits)
            fidelity *= 1.0 - edge.error
        else:
            qcal = cal.qubits[op.qubits[0]]
            if op.kind not in qcal.gates:
                raise KeyError(f"calibration has no entry for {op.kind} on qubit {op.qubits[0]}")
            fidelity *= 1.0 - qcal.gates[op.kind].error
    for q in circuit.measured_qubits:
        fidelity *= 1.0 - cal.qubits[q].mean_readout_error
    return fidelity
