"""Benchmark circuit families and synthetic ground-truth datasets.

Three families at desk scale: QAOA on fully connected cost Hamiltonians
(optionally realized through a linear SWAP network), hardware-efficient
cluster-Hamiltonian ansatz circuits, and seeded random circuits of depth
n + 3. ``synth_experiment`` replaces hardware execution: it simulates the
circuits under a hidden parameter vector and samples shot counts, labeling
4-6 qubit circuits as the training split and 7-9 as validation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .calibration import DeviceCalibration, EdgeCal, GateCal, QubitCal
from .channels import NoiseParams, build_parameterized_model
from .circuits import Circuit, GateOp
from .simulator import Counts, ProbDist, sample_counts, simulate

TRAIN_SIZES = (4, 5, 6)
VALIDATE_SIZES = (7, 8, 9)


def _h_ops(q: int) -> list[GateOp]:
    # H up to global phase: rz(pi/2) sx rz(pi/2)
    return [
        GateOp("rz", (q,), angle=math.pi / 2),
        GateOp("sx", (q,)),
        GateOp("rz", (q,), angle=math.pi / 2),
    ]


def _rx_ops(theta: float, q: int) -> list[GateOp]:
    # RX(theta) = rz(pi/2) sx rz(theta+pi) sx rz(pi/2) up to global phase
    return [
        GateOp("rz", (q,), angle=math.pi / 2),
        GateOp("sx", (q,)),
        GateOp("rz", (q,), angle=theta + math.pi),
        GateOp("sx", (q,)),
        GateOp("rz", (q,), angle=math.pi / 2),
    ]


def _ry_ops(theta: float, q: int) -> list[GateOp]:
    # RY(theta) = sx rz(theta+pi) sx rz(pi) up to global phase
    return [
        GateOp("sx", (q,)),
        GateOp("rz", (q,), angle=theta + math.pi),
        GateOp("sx", (q,)),
        GateOp("rz", (q,), angle=math.pi),
    ]


def _zz_ops(theta: float, a: int, b: int) -> list[GateOp]:
    # exp(-i theta/2 Z_a Z_b) = cx(a,b) rz(theta)@b cx(a,b)
    return [
        GateOp("cx", (a, b)),
        GateOp("rz", (b,), angle=theta),
        GateOp("cx", (a, b)),
    ]


def _zz_swap_ops(theta: float, a: int, b: int) -> list[GateOp]:
    # SWAP fused with exp(-i theta/2 ZZ): three cx and one rz
    return [
        GateOp("cx", (a, b)),
        GateOp("rz", (b,), angle=theta),
        GateOp("cx", (b, a)),
        GateOp("cx", (a, b)),
    ]


@dataclass(frozen=True)
class QaoaSpec:
    """Fully connected cost Hamiltonian sum_i c_i Z_i + sum_{i<j} c_ij Z_i Z_j
    with per-layer mixer angles."""

    n: int
    layers: int
    linear_terms: tuple[float, ...]
    quadratic_terms: Mapping[tuple[int, int], float]
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    swap_network: bool = True

    def __post_init__(self) -> None:
        if self.n < 2 or self.layers < 1:
            raise ValueError("QAOA spec needs n >= 2 and layers >= 1")
        if len(self.linear_terms) != self.n:
            raise ValueError("linear term count must equal n")
        if len(self.gammas) != self.layers or len(self.betas) != self.layers:
            raise ValueError("angle lists must have one entry per layer")
        pairs = {(min(i, j), max(i, j)) for i in range(self.n) for j in range(i + 1, self.n)}
        if set(self.quadratic_terms) != pairs:
            raise ValueError("quadratic terms must cover every unordered pair")
        object.__setattr__(self, "quadratic_terms", dict(self.quadratic_terms))

    @classmethod
    def random(cls, n: int, layers: int, seed: int, swap_network: bool = True) -> "QaoaSpec":
        rng = np.random.default_rng(seed)
        linear = tuple(rng.uniform(-1.0, 1.0, size=n))
        quadratic = {
            (i, j): float(rng.uniform(-1.0, 1.0))
            for i in range(n)
            for j in range(i + 1, n)
        }
        gammas = tuple(rng.uniform(0.2, 1.2, size=layers))
        betas = tuple(rng.uniform(0.2, 1.2, size=layers))
        return cls(
            n=n,
            layers=layers,
            linear_terms=linear,
            quadratic_terms=quadratic,
            gammas=gammas,
            betas=betas,
            swap_network=swap_network,
        )


def gen_qaoa(spec: QaoaSpec, name: str = "qaoa") -> Circuit:
    """QAOA ansatz starting from an explicit |+>^n layer.

    With ``swap_network`` the fully connected cost layer runs as n rounds of
    even/odd adjacent ZZ+SWAP blocks, so every two-qubit gate touches
    neighboring wires and each full cost layer reverses the logical order.
    Linear cost terms are applied before the network while the permutation
    is still known; the mixer is permutation-blind (same angle on every
    wire). Terminal measurement on all wires; the final logical-to-wire map
    is recorded in meta.
    """
    n = spec.n
    ops: list[GateOp] = []
    for q in range(n):
        ops.extend(_h_ops(q))
    wire_of = list(range(n))  # wire currently holding each logical qubit
    for layer in range(spec.layers):
        gamma = spec.gammas[layer]
        for logical, coeff in enumerate(spec.linear_terms):
            ops.append(GateOp("rz", (wire_of[logical],), angle=2.0 * gamma * coeff))
        if spec.swap_network:
            logical_at = {w: l for l, w in enumerate(wire_of)}
            for rnd in range(n):
                for a in range(rnd % 2, n - 1, 2):
                    b = a + 1
                    li, lj = logical_at[a], logical_at[b]
                    w = spec.quadratic_terms[(min(li, lj), max(li, lj))]
                    ops.extend(_zz_swap_ops(2.0 * gamma * w, a, b))
                    logical_at[a], logical_at[b] = lj, li
                    wire_of[li], wire_of[lj] = b, a
        else:
            for (i, j), w in sorted(spec.quadratic_terms.items()):
                ops.extend(_zz_ops(2.0 * gamma * w, wire_of[i], wire_of[j]))
        beta = spec.betas[layer]
        for q in range(n):
            ops.extend(_rx_ops(2.0 * beta, q))
    for q in range(n):
        ops.append(GateOp("measure", (q,)))
    meta = {
        "family": "qaoa",
        "layers": str(spec.layers),
        "swap_network": str(spec.swap_network).lower(),
        "wire_of_logical": json.dumps(wire_of),
    }
    return Circuit(name=name, num_qubits=n, ops=tuple(ops), meta=meta)


def gen_hw_efficient(
    n: int,
    reps: int,
    angles: Sequence[float],
    entangler: str = "cz",
    x_basis_middle: bool = False,
    name: str = "hweff",
) -> Circuit:
    """Hardware-efficient ansatz: alternating RY+RZ rotation layers and
    linear-chain entangler layers, with a final rotation layer.

    Needs 2 * n * (reps + 1) angles. ``x_basis_middle`` appends a basis
    change on the middle qubits before measurement (the second measurement
    group of the cluster Hamiltonian's qubit-wise commuting partition).
    """
    if entangler not in ("cx", "cz"):
        raise ValueError("entangler must be cx or cz")
    expected = 2 * n * (reps + 1)
    if len(angles) != expected:
        raise ValueError(f"expected {expected} angles, got {len(angles)}")
    it = iter(angles)
    ops: list[GateOp] = []
    for rep in range(reps + 1):
        for q in range(n):
            ops.extend(_ry_ops(next(it), q))
        for q in range(n):
            ops.append(GateOp("rz", (q,), angle=next(it)))
        if rep < reps:
            for q in range(n - 1):
                ops.append(GateOp(entangler, (q, q + 1)))
    if x_basis_middle:
        for q in range(1, n - 1):
            ops.extend(_h_ops(q))
    for q in range(n):
        ops.append(GateOp("measure", (q,)))
    meta = {
        "family": "hweff",
        "reps": str(reps),
        "entangler": entangler,
        "basis": "x_middle" if x_basis_middle else "z",
    }
    return Circuit(name=name, num_qubits=n, ops=tuple(ops), meta=meta)


def gen_random(
    n: int,
    seed: int,
    name: str = "random",
    coupling: Sequence[tuple[int, int]] | None = None,
    two_qubit_gate: str = "cx",
) -> Circuit:
    """Seeded random circuit with n + 3 layers mixing random SU(2) rotations
    (rz sx rz sx rz), bare x/sx gates, and two-qubit gates on random disjoint
    pairs (restricted to ``coupling`` when given)."""
    if n < 2:
        raise ValueError("random circuits need n >= 2")
    rng = np.random.default_rng(seed)
    layers = n + 3
    pairs = (
        [(a, b) for a, b in coupling if a < n and b < n]
        if coupling is not None
        else [(i, j) for i in range(n) for j in range(i + 1, n)]
    )
    if not pairs:
        raise ValueError("coupling leaves no usable pairs")
    ops: list[GateOp] = []
    for _ in range(layers):
        used: set[int] = set()
        for idx in rng.permutation(len(pairs)):
            a, b = pairs[idx]
            if a in used or b in used or rng.uniform() >= 0.5:
                continue
            if rng.uniform() < 0.5:
                a, b = b, a
            ops.append(GateOp(two_qubit_gate, (int(a), int(b))))
            used.update((a, b))
        for q in range(n):
            if q in used:
                continue
            roll = rng.uniform()
            if roll < 0.15:
                ops.append(GateOp("x", (q,)))
            elif roll < 0.3:
                ops.append(GateOp("sx", (q,)))
            else:
                a1, a2, a3 = rng.uniform(0.0, 2.0 * math.pi, size=3)
                ops.extend(
                    [
                        GateOp("rz", (q,), angle=float(a1)),
                        GateOp("sx", (q,)),
                        GateOp("rz", (q,), angle=float(a2)),
                        GateOp("sx", (q,)),
                        GateOp("rz", (q,), angle=float(a3)),
                    ]
                )
    for q in range(n):
        ops.append(GateOp("measure", (q,)))
    meta = {"family": "random", "layers": str(layers), "seed": str(seed)}
    return Circuit(name=name, num_qubits=n, ops=tuple(ops), meta=meta)


# --- synthetic device and datasets -------------------------------------------


def demo_calibration(num_qubits: int = 9, seed: int = 7) -> DeviceCalibration:
    """A plausible linear-chain superconducting-style snapshot (seeded)."""
    rng = np.random.default_rng([seed, num_qubits])
    qubits = []
    for _ in range(num_qubits):
        t1 = float(rng.uniform(80e-6, 150e-6))
        t2 = float(rng.uniform(0.4, 1.2) * t1)
        gates = {
            "rz": GateCal(error=0.0, duration=0.0),
            "id": GateCal(error=float(rng.uniform(1.5e-4, 4e-4)), duration=35.5e-9),
            "sx": GateCal(error=float(rng.uniform(1.5e-4, 4e-4)), duration=35.5e-9),
            "x": GateCal(error=float(rng.uniform(1.5e-4, 4e-4)), duration=35.5e-9),
        }
        qubits.append(
            QubitCal(
                t1=t1,
                t2=t2,
                readout_p01=float(rng.uniform(0.005, 0.025)),
                readout_p10=float(rng.uniform(0.01, 0.04)),
                gates=gates,
            )
        )
    edges = tuple(
        EdgeCal(
            qubits=(q, q + 1),
            gate_tag="cx",
            error=float(rng.uniform(5e-3, 1.2e-2)),
            duration=float(rng.uniform(300e-9, 500e-9)),
        )
        for q in range(num_qubits - 1)
    )
    return DeviceCalibration(
        num_qubits=num_qubits,
        qubits=tuple(qubits),
        edges=edges,
        t_char_1q=35.5e-9,
        t_char_2q=400e-9,
    )


def demo_hidden_params() -> NoiseParams:
    """Moderate ground-truth vector for synthetic recovery studies."""
    return NoiseParams(
        k_dep=4.0,
        b_dep=0.004,
        b_amp=0.002,
        theta_x=0.03,
        theta_y=-0.02,
        theta_z=0.02,
        beta_1q=1.1,
        k_dep_2q=3.0,
        b_dep_2q=0.01,
        b_amp_2q=0.006,
        b_phi_2q=0.008,
        theta_ix=0.05,
        theta_zx=-0.06,
        theta_zz=0.08,
        beta_2q=0.9,
        k_zz=0.12,
        ro_a_0011=0.8,
        ro_b_0011=0.012,
        ro_a_0110=0.5,
        ro_b_0110=0.006,
    )


@dataclass(frozen=True)
class FamilySpec:
    """One benchmark family: which sizes to emit and how many instances."""

    family: str  # "qaoa" | "hweff" | "random"
    sizes: tuple[int, ...]
    instances: int = 4
    layers: int = 1  # qaoa
    reps: int = 1  # hweff
    entangler: str = "cx"  # hweff; must match the device's native 2q gate
    swap_network: bool = True  # qaoa

    def __post_init__(self) -> None:
        if self.family not in ("qaoa", "hweff", "random"):
            raise ValueError(f"unknown family {self.family!r}")
        bad = [n for n in self.sizes if n not in TRAIN_SIZES + VALIDATE_SIZES]
        if bad:
            raise ValueError(f"sizes outside the 4-9 study range: {bad}")


@dataclass(frozen=True)
class SyntheticDataset:
    """Circuits with synthesized observations; the generating parameters are
    stored for audits but are not part of the fitting inputs."""

    circuits: tuple[Circuit, ...]
    observed: tuple[Counts | ProbDist, ...]
    calibration: DeviceCalibration
    hidden_params: NoiseParams
    splits: tuple[str, ...]
    shots: int | None

    def pairs(self, split: str) -> list[tuple[Circuit, Counts | ProbDist]]:
        return [
            (c, o)
            for c, o, s in zip(self.circuits, self.observed, self.splits)
            if s == split
        ]


def _family_circuits(
    spec: FamilySpec, seed: int, fam_index: int, cal: DeviceCalibration
) -> list[Circuit]:
    device_tags = {e.gate_tag for e in cal.edges}
    out = []
    for n in spec.sizes:
        for k in range(spec.instances):
            child = np.random.default_rng([seed, fam_index, n, k])
            sub_seed = int(child.integers(0, 2**31 - 1))
            base = f"{spec.family}_n{n}_i{k}"
            if spec.family == "qaoa":
                qspec = QaoaSpec.random(
                    n, spec.layers, seed=sub_seed, swap_network=spec.swap_network
                )
                out.append(gen_qaoa(qspec, name=base))
            elif spec.family == "random":
                tag = spec.entangler if spec.entangler in device_tags else next(iter(sorted(device_tags)))
                out.append(
                    gen_random(
                        n,
                        seed=sub_seed,
                        name=base,
                        coupling=cal.coupling_pairs(),
                        two_qubit_gate=tag,
                    )
                )
            else:
                if spec.entangler not in device_tags:
                    raise ValueError(
                        f"device calibrates {sorted(device_tags)} edges, not {spec.entangler!r}"
                    )
                rng = np.random.default_rng(sub_seed)
                angles = rng.uniform(-math.pi, math.pi, size=2 * n * (spec.reps + 1))
                for x_mid, suffix in ((False, "z"), (True, "xm")):
                    out.append(
                        gen_hw_efficient(
                            n,
                            spec.reps,
                            list(angles),
                            entangler=spec.entangler,
                            x_basis_middle=x_mid,
                            name=f"{base}_{suffix}",
                        )
                    )
    return out


def synth_experiment(
    families: Sequence[FamilySpec],
    cal: DeviceCalibration,
    hidden: NoiseParams,
    shots: int | None,
    seed: int,
) -> SyntheticDataset:
    """Simulate every circuit under the hidden model and sample counts.

    ``shots=None`` stores the exact distributions (infinite-shot mode).
    Splits follow qubit count: 4-6 train, 7-9 validate.
    """
    circuits: list[Circuit] = []
    for fam_index, spec in enumerate(families):
        circuits.extend(_family_circuits(spec, seed, fam_index, cal))
    observed: list[Counts | ProbDist] = []
    splits: list[str] = []
    model_cache: dict[tuple[int, ...], object] = {}
    shot_rng = np.random.default_rng([seed, 0xC0FFEE])
    for circuit in circuits:
        measured = circuit.measured_qubits
        if measured not in model_cache:
            model_cache[measured] = build_parameterized_model(hidden, cal, measured)
        dist = simulate(circuit, model_cache[measured])
        if shots is None:
            observed.append(dist)
        else:
            observed.append(
                sample_counts(dist, shots, seed=int(shot_rng.integers(0, 2**31 - 1)))
            )
        splits.append("train" if circuit.num_qubits in TRAIN_SIZES else "validate")
    return SyntheticDataset(
        circuits=tuple(circuits),
        observed=tuple(observed),
        calibration=cal,
        hidden_params=hidden,
        splits=tuple(splits),
        shots=shots,
    )
