"""Kraus / superoperator / Choi conversions and Pauli constants.

Conventions used throughout the package:

* Local basis index of a k-qubit operator is little-endian in the qubit
  tuple: bit m of the index belongs to the m-th qubit of the tuple.
* ``vec`` is row-major (C-order) flattening, so the superoperator of a
  Kraus set {K_i} is ``sum_i kron(K_i, conj(K_i))``.

``kron`` here is a broadcast-based replacement for ``np.kron``; channel
construction calls it thousands of times per objective evaluation and the
numpy version's dispatch overhead dominates at these matrix sizes.
"""
from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS_1Q = (I2, PAULI_X, PAULI_Y, PAULI_Z)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def two_site(op_first: np.ndarray, op_second: np.ndarray) -> np.ndarray:
    """4x4 operator acting as ``op_first`` on the tuple's first qubit (local
    bit 0) and ``op_second`` on its second (local bit 1)."""
    return kron(op_second, op_first)


PAULIS_2Q = tuple(two_site(p, q) for q in PAULIS_1Q for p in PAULIS_1Q)


def paulis_2q() -> tuple[np.ndarray, ...]:
    """The 16 two-qubit Pauli products, identity first."""
    return PAULIS_2Q


def hermitian_expm(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """exp(-1j * scale * h) for Hermitian h, via eigendecomposition."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * scale * vals)) @ vecs.conj().T


def completeness_defect(operators: list[np.ndarray]) -> float:
    """Frobenius norm of (sum K†K - I)."""
    dim = operators[0].shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for k in operators:
        acc += k.conj().T @ k
    return float(np.linalg.norm(acc - np.eye(dim)))


def superop_from_kraus(operators) -> np.ndarray:
    dim = operators[0].shape[0]
    s = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in operators:
        s += kron(k, k.conj())
    return s


def superop_from_unitary(u: np.ndarray) -> np.ndarray:
    return kron(u, u.conj())


# Superoperators of the Pauli conjugation maps, for weighted Pauli channels.
PAULI_SUPEROPS_1Q = tuple(superop_from_unitary(p) for p in PAULIS_1Q)
PAULI_SUPEROPS_2Q = tuple(superop_from_unitary(p) for p in PAULIS_2Q)


def choi_from_superop(s: np.ndarray) -> np.ndarray:
    """Reshuffle a row-major superoperator into the Choi matrix."""
    d2 = s.shape[0]
    d = int(round(d2**0.5))
    return s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d2, d2)


def kraus_from_choi(choi: np.ndarray, tol: float = 1e-12) -> list[np.ndarray]:
    """Minimal Kraus set of a Choi matrix via eigendecomposition.

    Eigenvalues below ``tol`` (numerical noise, including slightly negative
    ones) are dropped.
    """
    d2 = choi.shape[0]
    d = int(round(d2**0.5))
    vals, vecs = np.linalg.eigh((choi + choi.conj().T) / 2.0)
    ops = []
    for lam, vec in zip(vals, vecs.T):
        if lam > tol:
            ops.append(np.sqrt(lam) * vec.reshape(d, d))
    return ops


def kraus_from_superop(s: np.ndarray) -> list[np.ndarray]:
    return kraus_from_choi(choi_from_superop(s))


def compose_kraus(stages: list[list[np.ndarray]]) -> list[np.ndarray]:
    """Kraus set of the composition of ``stages`` (first entry applied first).

    Composed in superoperator form and reduced back through the Choi matrix,
    so the result has at most d^2 operators regardless of stage count.
    """
    s = superop_from_kraus(stages[0])
    for stage in stages[1:]:
        s = superop_from_kraus(stage) @ s
    return kraus_from_superop(s)
