"""Exact density-matrix simulation of circuits under a noise model.

Deterministic: ``simulate`` returns the exact outcome distribution; all
stochasticity lives in :func:`sample_counts`. Qubit 0 is the least
significant bit everywhere; rendered bitstrings put qubit 0 rightmost.
The default qubit cap of 12 bounds the density matrix at 4096 x 4096.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .channels import KrausChannel, NoiseModel, ReadoutModel
from .circuits import Circuit, SchemaError
from .linalg import PAULI_X, superop_from_unitary

DEFAULT_QUBIT_CAP = 12

SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)  # local bit 0 = control (first qubit of the op tuple)
CZ_MATRIX = np.diag([1, 1, 1, -1]).astype(complex)


class SimulationError(RuntimeError):
    pass


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "id":
        return np.eye(2, dtype=complex)
    if kind == "x":
        return PAULI_X.copy()
    if kind == "sx":
        return SX_MATRIX.copy()
    if kind == "rz":
        half = 0.5 * float(angle)  # exp(-i angle Z / 2)
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    if kind == "cx":
        return CX_MATRIX.copy()
    if kind == "cz":
        return CZ_MATRIX.copy()
    raise ValueError(f"no unitary for op kind {kind!r}")


_FIXED_GATE_SUPEROPS = {
    kind: superop_from_unitary(gate_matrix(kind)) for kind in ("id", "sx", "x", "cx", "cz")
}


def _gate_superop(kind: str, angle: float | None) -> np.ndarray:
    if kind == "rz":
        return superop_from_unitary(gate_matrix("rz", angle))
    return _FIXED_GATE_SUPEROPS[kind]


@dataclass
class DensityMatrix:
    n: int
    data: np.ndarray

    def __post_init__(self) -> None:
        dim = 2**self.n
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (dim, dim):
            raise ValueError(f"density matrix shape {self.data.shape} != {(dim, dim)}")

    @classmethod
    def ground_state(cls, n: int) -> "DensityMatrix":
        data = np.zeros((2**n, 2**n), dtype=complex)
        data[0, 0] = 1.0
        return cls(n=n, data=data)

    def validate(self, herm_tol: float = 1e-10, eig_tol: float = 1e-9) -> None:
        if np.linalg.norm(self.data - self.data.conj().T) > herm_tol:
            raise ValueError("density matrix not Hermitian within tolerance")
        if abs(np.trace(self.data).real - 1.0) > herm_tol:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh((self.data + self.data.conj().T) / 2).min() < -eig_tol:
            raise ValueError("density matrix has a significantly negative eigenvalue")


@dataclass(frozen=True)
class ProbDist:
    """Probabilities over the computational basis of ``qubits`` (ascending).

    Vector index bit k corresponds to the k-th smallest listed qubit, so the
    rendered fixed-width bitstring has qubit 0 rightmost.
    """

    probs: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if probs.shape != (2 ** len(self.qubits),):
            raise ValueError("probability vector length does not match qubit count")
        if np.any(probs < -1e-9) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be nonnegative and sum to 1")

    @property
    def n(self) -> int:
        return len(self.qubits)

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.n}b")

    def as_table(self) -> dict[str, float]:
        return {self.bitstring(i): float(p) for i, p in enumerate(self.probs) if p > 0.0}


@dataclass(frozen=True)
class Counts:
    """Sampled shot table keyed by fixed-width bitstring (qubit 0 rightmost)."""

    shots: int
    table: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", dict(self.table))
        if self.shots <= 0:
            raise ValueError("shots must be positive")
        widths = {len(k) for k in self.table}
        if len(widths) > 1:
            raise ValueError("bitstrings must share one width")
        if sum(self.table.values()) != self.shots:
            raise ValueError("counts must sum to shots")

    @property
    def width(self) -> int:
        return len(next(iter(self.table)))

    def frequencies(self) -> np.ndarray:
        vec = np.zeros(2**self.width)
        for bits, count in self.table.items():
            vec[int(bits, 2)] = count / self.shots
        return vec


def counts_to_doc(counts: Counts) -> dict[str, Any]:
    return {"shots": counts.shots, "counts": {k: int(v) for k, v in sorted(counts.table.items())}}


def counts_from_doc(doc: Mapping[str, Any]) -> Counts:
    try:
        return Counts(shots=int(doc["shots"]), table={str(k): int(v) for k, v in doc["counts"].items()})
    except KeyError as exc:
        raise SchemaError(f"counts document missing field {exc.args[0]!r}") from None


def load_counts(path: str | Path) -> Counts:
    with open(path, encoding="utf-8") as fh:
        return counts_from_doc(json.load(fh))


def save_counts(counts: Counts, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(counts_to_doc(counts), fh)
        fh.write("\n")


# --- tensor application ------------------------------------------------------


from functools import lru_cache


@lru_cache(maxsize=4096)
def _perm_data(targets: tuple[int, ...], n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    row_block = [n - 1 - t for t in reversed(targets)]
    col_block = [2 * n - 1 - t for t in reversed(targets)]
    other_rows = [a for a in range(n) if a not in row_block]
    other_cols = [a for a in range(n, 2 * n) if a not in col_block]
    perm = tuple(row_block + other_rows + col_block + other_cols)
    inverse = tuple(int(i) for i in np.argsort(perm))
    return perm, inverse


def _apply_superop_array(
    rho: np.ndarray, superop: np.ndarray, targets: tuple[int, ...], n: int
) -> np.ndarray:
    """Contract a k-qubit superoperator into the full density matrix."""
    k = len(targets)
    d = 2**k
    rest = 2 ** (n - k)
    perm, inverse = _perm_data(targets, n)
    tensor = rho.reshape((2,) * (2 * n)).transpose(perm)
    block = tensor.reshape(d, rest, d, rest).transpose(0, 2, 1, 3).reshape(d * d, rest * rest)
    block = superop @ block
    tensor = (
        block.reshape(d, d, rest, rest)
        .transpose(0, 2, 1, 3)
        .reshape((2,) * (2 * n))
        .transpose(inverse)
    )
    return np.ascontiguousarray(tensor).reshape(2**n, 2**n)


def _apply_rz_array(rho: np.ndarray, angle: float, q: int, n: int) -> np.ndarray:
    # diagonal unitary: scale entries by exp(-i angle/2 (-1)^row_bit) and conj
    half = 0.5 * angle
    u = np.array([np.exp(-1j * half), np.exp(1j * half)])
    scale = u[:, None] * u.conj()[None, :]
    shape = [1] * (2 * n)
    shape[n - 1 - q] = 2
    shape[2 * n - 1 - q] = 2
    out = rho.reshape((2,) * (2 * n)) * scale.reshape(shape)
    return out.reshape(2**n, 2**n)


def _apply_unitary_array(
    rho: np.ndarray, u: np.ndarray, targets: tuple[int, ...], n: int
) -> np.ndarray:
    return _apply_superop_array(rho, superop_from_unitary(u), targets, n)


def apply_channel(rho: DensityMatrix, channel: KrausChannel, qubits: tuple[int, ...]) -> DensityMatrix:
    """rho -> sum_i K_i rho K_i† with the operators embedded on ``qubits``."""
    if len(qubits) != channel.arity:
        raise SimulationError(
            f"channel arity {channel.arity} does not match target {qubits}"
        )
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < rho.n for q in qubits):
        raise SimulationError(f"invalid target qubits {qubits}")
    data = _apply_superop_array(rho.data, channel.superop, tuple(qubits), rho.n)
    return DensityMatrix(n=rho.n, data=data)


def apply_unitary(rho: DensityMatrix, u: np.ndarray, qubits: tuple[int, ...]) -> DensityMatrix:
    data = _apply_unitary_array(rho.data, u, tuple(qubits), rho.n)
    return DensityMatrix(n=rho.n, data=data)


# --- circuit simulation -------------------------------------------------------


def simulate(
    circuit: Circuit,
    model: NoiseModel | None = None,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> ProbDist:
    """Evolve the circuit exactly and return the outcome distribution.

    Each op applies its ideal unitary followed by its noise channel (if a
    model is given); the readout model then maps the ideal distribution to
    the observed one. Circuits without measure ops report all qubits.
    """
    n = circuit.num_qubits
    if n > qubit_cap:
        raise SimulationError(f"{n}-qubit circuit exceeds the {qubit_cap}-qubit cap")
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    fused: dict = model.fused_cache if model is not None else {}
    for op in circuit.ops:
        if op.is_measure:
            continue
        if op.kind == "rz" and op.duration_override is None:
            # virtual frame change: diagonal fast path, never noisy
            rho = _apply_rz_array(rho, op.angle, op.qubits[0], n)
            continue
        key = (op.kind, op.qubits, op.angle, op.duration_override)
        superop = fused.get(key)
        if superop is None:
            superop = _gate_superop(op.kind, op.angle)
            if model is not None:
                channel = model.channel_for(op.kind, op.qubits, op.duration_override)
                if channel is not None:
                    superop = channel.superop @ superop
                elif op.kind != "rz":
                    raise SimulationError(
                        f"noise model lacks a channel for {op.kind} on {op.qubits}"
                    )
            fused[key] = superop
        rho = _apply_superop_array(rho, superop, op.qubits, n)
    measured = circuit.measured_qubits or tuple(range(n))
    probs = _diagonal_marginal(rho, measured, n)
    dist = ProbDist(probs=probs, qubits=measured)
    if model is not None:
        dist = apply_readout(dist, model.readout)
    return dist


def _diagonal_marginal(rho: np.ndarray, measured: tuple[int, ...], n: int) -> np.ndarray:
    diag = np.real(np.diagonal(rho)).copy()
    diag[diag < 0] = 0.0  # clip eigenvalue-level float noise
    tensor = diag.reshape((2,) * n)
    drop = tuple(n - 1 - q for q in range(n) if q not in measured)
    if drop:
        tensor = tensor.sum(axis=drop)
    return tensor.reshape(-1)


def apply_readout(dist: ProbDist, readout: ReadoutModel) -> ProbDist:
    """Apply pair and single confusion matrices by tensor contraction."""
    covered = readout.covered_qubits()
    if tuple(sorted(covered)) != dist.qubits:
        raise SimulationError(
            f"readout model covers qubits {covered}, distribution has {dist.qubits}"
        )
    m = dist.n
    axis_of = {q: m - 1 - i for i, q in enumerate(dist.qubits)}
    tensor = dist.probs.reshape((2,) * m)
    for q, mat in sorted(readout.single_matrices.items()):
        ax = axis_of[q]
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [ax])), 0, ax)
    for (q0, q1), mat in sorted(readout.pair_matrices.items()):
        ax0, ax1 = axis_of[q0], axis_of[q1]
        # 4x4 -> (out_q1, out_q0, in_q1, in_q0); q0 occupies the low local bit
        m4 = mat.reshape(2, 2, 2, 2)
        tensor = np.moveaxis(
            np.tensordot(m4, tensor, axes=([2, 3], [ax1, ax0])), [0, 1], [ax1, ax0]
        )
    return ProbDist(probs=tensor.reshape(-1), qubits=dist.qubits)


def sample_counts(dist: ProbDist, shots: int, seed: int) -> Counts:
    """Multinomial draw with numpy's PCG64 generator; deterministic per
    (distribution, shots, seed)."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    p = np.clip(dist.probs, 0.0, None)
    p = p / p.sum()
    draws = rng.multinomial(shots, p)
    table = {dist.bitstring(i): int(c) for i, c in enumerate(draws) if c > 0}
    return Counts(shots=shots, table=table)
