"""Qiskit-compatible stand-in objects and an independent statevector oracle.

The stand-ins mirror the exact public access patterns the bridge uses
(``circuit.data`` yielding instructions with ``.operation``/``.qubits``/
``.clbits``, and ``circuit.find_bit``), so the same bridge code paths run
whether or not the SDK is installed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np
import pytest


@dataclass(frozen=True)
class Bit:
    register: str
    index: int


@dataclass(frozen=True)
class Operation:
    name: str
    params: tuple = ()


@dataclass(frozen=True)
class Instruction:
    operation: Operation
    qubits: tuple
    clbits: tuple = ()


class StandInCircuit:
    """Minimal transpiled-circuit double exposing qiskit's access surface."""

    def __init__(self, num_qubits: int, name: str = "") -> None:
        self.num_qubits = num_qubits
        self.num_clbits = num_qubits
        self.name = name
        self._qubits = [Bit("q", i) for i in range(num_qubits)]
        self._clbits = [Bit("c", i) for i in range(num_qubits)]
        self.data: list[Instruction] = []

    def find_bit(self, bit: Bit) -> SimpleNamespace:
        pool = self._qubits if bit.register == "q" else self._clbits
        return SimpleNamespace(index=pool.index(bit))

    def _append(self, name: str, qubits, params=(), clbits=()) -> None:
        self.data.append(
            Instruction(
                operation=Operation(name=name, params=tuple(params)),
                qubits=tuple(self._qubits[q] for q in qubits),
                clbits=tuple(self._clbits[c] for c in clbits),
            )
        )

    def id(self, q):
        self._append("id", [q])

    def rz(self, angle, q):
        self._append("rz", [q], params=[angle])

    def sx(self, q):
        self._append("sx", [q])

    def x(self, q):
        self._append("x", [q])

    def cx(self, a, b):
        self._append("cx", [a, b])

    def cz(self, a, b):
        self._append("cz", [a, b])

    def barrier(self, *qs):
        self._append("barrier", list(qs))

    def measure(self, q, c):
        self._append("measure", [q], clbits=[c])

    def measure_all_identity(self):
        for q in range(self.num_qubits):
            self.measure(q, q)


# --- independent little-endian statevector oracle -----------------------------

_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _apply_1q(state: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    psi = state.reshape((2,) * n)
    axis = n - 1 - q
    return np.moveaxis(np.tensordot(u, psi, axes=([1], [axis])), 0, axis).reshape(-1)


def _apply_cx(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    out = state.copy()
    for i in range(2**n):
        if (i >> control) & 1 and not (i >> target) & 1:
            j = i | (1 << target)
            out[i], out[j] = state[j], state[i]
    return out


def _apply_cz(state: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    out = state.copy()
    for i in range(2**n):
        if (i >> a) & 1 and (i >> b) & 1:
            out[i] = -out[i]
    return out


def statevector_probabilities(circuit: StandInCircuit) -> dict[str, float]:
    """Ideal measurement distribution of a stand-in circuit, computed with a
    plain statevector loop (independent of both the bridge and noisefit)."""
    n = circuit.num_qubits
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for instruction in circuit.data:
        name = instruction.operation.name
        qs = [circuit.find_bit(q).index for q in instruction.qubits]
        if name in ("measure", "barrier", "id"):
            continue
        if name == "rz":
            angle = instruction.operation.params[0]
            u = np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
            state = _apply_1q(state, u, qs[0], n)
        elif name == "sx":
            state = _apply_1q(state, _SX, qs[0], n)
        elif name == "x":
            state = _apply_1q(state, _X, qs[0], n)
        elif name == "cx":
            state = _apply_cx(state, qs[0], qs[1], n)
        elif name == "cz":
            state = _apply_cz(state, qs[0], qs[1], n)
        else:
            raise ValueError(f"oracle cannot apply {name!r}")
    probs = np.abs(state) ** 2
    return {format(i, f"0{n}b"): float(p) for i, p in enumerate(probs) if p > 0}


def random_standin_circuit(seed: int) -> StandInCircuit:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    c = StandInCircuit(n, name=f"rand_{seed}")
    for _ in range(int(rng.integers(4, 14))):
        roll = rng.uniform()
        if roll < 0.35 and n >= 2:
            a, b = rng.choice(n, size=2, replace=False)
            c.cx(int(a), int(b))
        elif roll < 0.55:
            c.rz(float(rng.uniform(0, 2 * math.pi)), int(rng.integers(0, n)))
        elif roll < 0.75:
            c.sx(int(rng.integers(0, n)))
        elif roll < 0.9:
            c.x(int(rng.integers(0, n)))
        else:
            c.barrier(*range(n))
    c.measure_all_identity()
    return c


@pytest.fixture
def bell_standin() -> StandInCircuit:
    c = StandInCircuit(2, name="bell")
    c.rz(math.pi / 2, 0)
    c.sx(0)
    c.rz(math.pi / 2, 0)
    c.cx(0, 1)
    c.measure_all_identity()
    return c


def ideal_properties_payload(num_qubits: int, zero_durations: bool = False) -> dict:
    """BackendProperties.to_dict()-shaped snapshot of a noiseless device
    with all-to-all cx coupling.

    ``zero_durations`` makes every decay window exactly zero, so a
    zero-noise parameterized model is bit-exactly the ideal simulator
    (used by the round-trip acceptance tests).
    """
    t_1q = 0.0 if zero_durations else 35.0
    t_2q = 0.0 if zero_durations else 400.0
    qubits = []
    for _ in range(num_qubits):
        qubits.append(
            [
                {"name": "T1", "value": 1e9, "unit": "us"},
                {"name": "T2", "value": 2e9, "unit": "us"},
                {"name": "prob_meas1_prep0", "value": 0.0, "unit": ""},
                {"name": "prob_meas0_prep1", "value": 0.0, "unit": ""},
            ]
        )
    gates = []
    for q in range(num_qubits):
        for tag in ("id", "sx", "x"):
            gates.append(
                {
                    "gate": tag,
                    "qubits": [q],
                    "parameters": [
                        {"name": "gate_error", "value": 0.0, "unit": ""},
                        {"name": "gate_length", "value": t_1q, "unit": "ns"},
                    ],
                }
            )
    for a in range(num_qubits):
        for b in range(a + 1, num_qubits):
            gates.append(
                {
                    "gate": "cx",
                    "qubits": [a, b],
                    "parameters": [
                        {"name": "gate_error", "value": 0.0, "unit": ""},
                        {"name": "gate_length", "value": t_2q, "unit": "ns"},
                    ],
                }
            )
    return {"backend_name": "standin", "qubits": qubits, "gates": gates}


ZERO_NOISE_PARAMS = {
    "k_dep": 0.0,
    "b_dep": 0.0,
    "b_amp": 0.0,
    "theta_x": 0.0,
    "theta_y": 0.0,
    "theta_z": 0.0,
    "beta_1q": 1.0,
    "k_dep_2q": 0.0,
    "b_dep_2q": 0.0,
    "b_amp_2q": 0.0,
    "b_phi_2q": 0.0,
    "theta_ix": 0.0,
    "theta_zx": 0.0,
    "theta_zz": 0.0,
    "beta_2q": 1.0,
    "k_zz": 0.0,
    "ro_a_0011": 0.0,
    "ro_b_0011": 0.0,
    "ro_a_0110": 0.0,
    "ro_b_0110": 0.0,
}
