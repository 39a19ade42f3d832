"""Noise-channel construction from calibration data and a parameter vector.

Two model families are built here:

* the vendor-style default model: per gate, a depolarizing channel whose
  strength is solved so the composite (with thermal relaxation) reproduces
  the calibrated gate error, plus independent per-qubit readout matrices;
* the learnable 20-parameter model: composed coherent / depolarizing /
  amplitude-damping / stretched-exponential phase-damping channels per gate,
  a correlated ZZ channel and crosstalk Hamiltonian on two-qubit gates, and
  pairwise-correlated readout on greedily matched qubit pairs.

All probability producers clamp to [0, 1]; clamp events are counted so an
optimizer wandering outside physical ranges stays observable.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

import numpy as np
from scipy.optimize import brentq

from .calibration import (
    DeviceCalibration,
    EdgeCal,
    GateCal,
    PairMatching,
    QubitCal,
    greedy_pair_matching,
    pure_dephasing_time,
)
from .circuits import SchemaError
from .linalg import (
    I2,
    PAULI_SUPEROPS_1Q,
    PAULI_SUPEROPS_2Q,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    completeness_defect,
    compose_kraus,
    hermitian_expm,
    kraus_from_superop,
    paulis_2q,
    superop_from_kraus,
    superop_from_unitary,
    two_site,
)

# Weighted-Pauli channel superoperators assemble from these constants.
_SUM_XYZ_1Q = sum(PAULI_SUPEROPS_1Q[1:])
_SUM_NONID_2Q = sum(PAULI_SUPEROPS_2Q[1:])
_SUPEROP_ZZ = PAULI_SUPEROPS_2Q[15]
_EYE_4 = np.eye(4, dtype=complex)
_EYE_16 = np.eye(16, dtype=complex)

COMPLETENESS_TOL = 1e-9
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class NoiseParams:
    """The 20 learnable coefficients, grouped 7 (1Q) + 9 (2Q) + 4 (readout).

    Coherent amplitudes are dimensionless: they enter as
    exp(-i (t_g / t_char) H), so bounds transfer across devices.
    """

    # single-qubit gates
    k_dep: float
    b_dep: float
    b_amp: float
    theta_x: float
    theta_y: float
    theta_z: float
    beta_1q: float
    # two-qubit gates
    k_dep_2q: float
    b_dep_2q: float
    b_amp_2q: float
    b_phi_2q: float
    theta_ix: float
    theta_zx: float
    theta_zz: float
    beta_2q: float
    k_zz: float
    # correlated readout
    ro_a_0011: float
    ro_b_0011: float
    ro_a_0110: float
    ro_b_0110: float

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def zeros(cls) -> "NoiseParams":
        """No-noise point (stretch exponents at 1, all rates/offsets at 0)."""
        values = {name: 0.0 for name in cls.field_names()}
        values["beta_1q"] = 1.0
        values["beta_2q"] = 1.0
        return cls(**values)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "NoiseParams":
        names = set(cls.field_names())
        missing = names - set(doc)
        if missing:
            raise SchemaError(f"missing noise parameters: {sorted(missing)}")
        extra = set(doc) - names
        if extra:
            raise SchemaError(f"unknown noise parameters: {sorted(extra)}")
        return cls(**{k: float(doc[k]) for k in names})

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.field_names()}


def _clamp01(value: float, clamps: Counter | None, key: str) -> float:
    if 0.0 <= value <= 1.0:
        return value
    if clamps is not None:
        clamps[key] += 1
    return min(1.0, max(0.0, value))


def _one_minus_exp(x: float) -> float:
    # 1 - exp(-x) for any real x, without overflow (clamping handles the rest)
    if x < -709.0:
        return -math.inf
    return -math.expm1(-x)


def depolarizing_prob(
    e_g: float,
    t_g: float,
    k: float,
    b: float,
    t_char: float,
    clamps: Counter | None = None,
) -> float:
    """Duration-aware saturating depolarization probability
    1 - exp(-(k e_g + b) t_g / t_char)."""
    lam = _one_minus_exp((k * e_g + b) * t_g / t_char)
    return _clamp01(lam, clamps, "dep")


def amplitude_damping_prob(
    t_g: float, t1: float, b_amp: float, clamps: Counter | None = None
) -> float:
    """Relaxation probability 1 - exp(-t_g / T1) plus a learnable offset."""
    lam = _one_minus_exp(t_g / t1) + b_amp
    return _clamp01(lam, clamps, "amp")


def phase_flip_prob(
    t_g: float,
    t_phi: float,
    beta: float,
    b_phi: float = 0.0,
    clamps: Counter | None = None,
) -> float:
    """Stretched-exponential phase-flip probability
    1 - exp(-2 (t_g / T_phi)^beta) plus an offset (two-qubit contexts only).

    ``t_phi`` may be infinite (no pure dephasing); t_g = 0 likewise yields
    just the offset, for any stretch exponent.
    """
    if math.isinf(t_phi) or t_g == 0.0:
        lam = b_phi
    else:
        lam = _one_minus_exp(2.0 * (t_g / t_phi) ** beta) + b_phi
    return _clamp01(lam, clamps, "phase")


def zz_prob(
    t_g: float, k_zz: float, t_char_2q: float, clamps: Counter | None = None
) -> float:
    """Correlated ZZ-dephasing probability 1 - exp(-k_zz t_g / t_char_2q)."""
    lam = _one_minus_exp(k_zz * t_g / t_char_2q)
    return _clamp01(lam, clamps, "zz")


def coherent_unitary_1q(
    theta_x: float, theta_y: float, theta_z: float, t_g: float, t_char: float
) -> np.ndarray:
    """exp(-i (t_g/t_char) (theta_x X + theta_y Y + theta_z Z))."""
    h = theta_x * PAULI_X + theta_y * PAULI_Y + theta_z * PAULI_Z
    return hermitian_expm(h, t_g / t_char)


def coherent_unitary_2q(
    theta_ix: float, theta_zx: float, theta_zz: float, t_g: float, t_char_2q: float
) -> np.ndarray:
    """exp(-i (t_g/t_char_2q) (theta_ix IX + theta_zx ZX + theta_zz ZZ)).

    X factors act on the second qubit of the gate tuple (the target for cx),
    Z factors on the first. The three terms do not all commute; the matrix
    exponential is taken on the summed 4x4 Hamiltonian.
    """
    h = (
        theta_ix * two_site(I2, PAULI_X)
        + theta_zx * two_site(PAULI_Z, PAULI_X)
        + theta_zz * two_site(PAULI_Z, PAULI_Z)
    )
    return hermitian_expm(h, t_g / t_char_2q)


# --- Kraus factories -------------------------------------------------------


def depolarizing_kraus_1q(lam: float) -> list[np.ndarray]:
    if lam == 0.0:
        return [I2.copy()]
    return [math.sqrt(1.0 - lam) * I2] + [
        math.sqrt(lam / 3.0) * p for p in (PAULI_X, PAULI_Y, PAULI_Z)
    ]


def depolarizing_kraus_2q(lam: float) -> list[np.ndarray]:
    if lam == 0.0:
        return [np.eye(4, dtype=complex)]
    ps = paulis_2q()
    return [math.sqrt(1.0 - lam) * ps[0]] + [math.sqrt(lam / 15.0) * p for p in ps[1:]]


def amplitude_damping_kraus(lam: float) -> list[np.ndarray]:
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - lam)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(lam)], [0.0, 0.0]], dtype=complex)
    return [k0, k1] if lam > 0.0 else [k0]


def phase_flip_kraus(lam: float) -> list[np.ndarray]:
    if lam == 0.0:
        return [I2.copy()]
    return [math.sqrt(1.0 - lam) * I2, math.sqrt(lam) * PAULI_Z]


def zz_kraus(lam: float) -> list[np.ndarray]:
    if lam == 0.0:
        return [np.eye(4, dtype=complex)]
    zz = two_site(PAULI_Z, PAULI_Z)
    return [math.sqrt(1.0 - lam) * np.eye(4, dtype=complex), math.sqrt(lam) * zz]


def _dep_superop_1q(lam: float) -> np.ndarray:
    return (1.0 - lam) * _EYE_4 + (lam / 3.0) * _SUM_XYZ_1Q


def _dep_superop_2q(lam: float) -> np.ndarray:
    return (1.0 - lam) * _EYE_16 + (lam / 15.0) * _SUM_NONID_2Q


def _phase_superop(lam: float) -> np.ndarray:
    return (1.0 - lam) * _EYE_4 + lam * PAULI_SUPEROPS_1Q[3]


def _zz_superop(lam: float) -> np.ndarray:
    return (1.0 - lam) * _EYE_16 + lam * _SUPEROP_ZZ


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map as a list of Kraus operators on 1 or 2 qubits."""

    arity: int
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        dim = 2**self.arity
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        for k in ops:
            if k.shape != (dim, dim):
                raise ValueError(f"Kraus operator shape {k.shape} != {(dim, dim)}")
        object.__setattr__(self, "operators", ops)
        defect = completeness_defect(list(ops))
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness defect {defect:.3e} exceeds tolerance")

    @cached_property
    def superop(self) -> np.ndarray:
        return superop_from_kraus(list(self.operators))

    @classmethod
    def from_superop(cls, arity: int, superop: np.ndarray) -> "KrausChannel":
        dim = 2**arity
        if np.array_equal(superop, np.eye(dim * dim)):
            # exact identity (e.g. zero-noise parameters on an ideal
            # calibration): skip the eigendecomposition so the channel is
            # bit-exactly a no-op
            operators: tuple[np.ndarray, ...] = (np.eye(dim, dtype=complex),)
        else:
            operators = tuple(kraus_from_superop(superop))
        channel = cls(arity=arity, operators=operators)
        channel.__dict__["superop"] = superop  # seed the cache
        return channel

    def is_identity(self, tol: float = 1e-12) -> bool:
        eye = np.eye((2**self.arity) ** 2)
        return bool(np.linalg.norm(self.superop - eye) <= tol)


def identity_channel(arity: int) -> KrausChannel:
    return KrausChannel(arity=arity, operators=(np.eye(2**arity, dtype=complex),))


@dataclass(frozen=True)
class ReadoutModel:
    """Column-stochastic confusion matrices: 4x4 per matched pair (stored
    with the lower qubit index on the local low bit), 2x2 per single."""

    pair_matrices: Mapping[tuple[int, int], np.ndarray]
    single_matrices: Mapping[int, np.ndarray]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair_matrices", dict(self.pair_matrices))
        object.__setattr__(self, "single_matrices", dict(self.single_matrices))
        for m in list(self.pair_matrices.values()) + list(self.single_matrices.values()):
            if np.any(m < -STOCHASTIC_TOL) or np.any(m > 1.0 + STOCHASTIC_TOL):
                raise ValueError("readout matrix entries outside [0, 1]")
            if np.max(np.abs(m.sum(axis=0) - 1.0)) > STOCHASTIC_TOL:
                raise ValueError("readout matrix columns must sum to 1")

    def covered_qubits(self) -> tuple[int, ...]:
        qs = [q for pair in self.pair_matrices for q in pair]
        qs.extend(self.single_matrices)
        return tuple(sorted(qs))


ChannelBuilder = Callable[[str, tuple[int, ...], float], "KrausChannel | None"]


@dataclass(frozen=True)
class NoiseModel:
    """Compiled map from (gate tag, qubit tuple) to channel, plus readout.

    ``rz`` carries no entry (noiseless frame change) unless an op overrides
    its duration, in which case ``channel_for`` rebuilds via ``builder``.
    """

    gate_channels: Mapping[tuple[str, tuple[int, ...]], KrausChannel]
    readout: ReadoutModel
    clamp_events: Mapping[str, int] = field(default_factory=dict)
    boundary_gates: tuple[str, ...] = ()
    builder: ChannelBuilder | None = None
    # per-model scratch: gate superop fused with the channel, keyed by op
    fused_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gate_channels", dict(self.gate_channels))
        object.__setattr__(self, "clamp_events", dict(self.clamp_events))

    def channel_for(
        self, tag: str, qubits: tuple[int, ...], duration_override: float | None = None
    ) -> KrausChannel | None:
        if duration_override is not None and self.builder is not None:
            return self.builder(tag, qubits, duration_override)
        return self.gate_channels.get((tag, qubits))


def single_readout_matrix(qcal: QubitCal) -> np.ndarray:
    return np.array(
        [
            [1.0 - qcal.readout_p01, qcal.readout_p10],
            [qcal.readout_p01, 1.0 - qcal.readout_p10],
        ]
    )


# --- parameterized model ----------------------------------------------------


def build_1q_channel(
    params: NoiseParams,
    qcal: QubitCal,
    gate_tag: str,
    t_char_1q: float,
    clamps: Counter | None = None,
) -> KrausChannel:
    """Composite single-qubit gate channel: coherent error, then
    depolarizing, then amplitude damping, then phase flip.

    The coherent factor is omitted for the identity gate.
    """
    if gate_tag not in ("id", "sx", "x"):
        raise ValueError(f"no parameterized single-qubit channel for tag {gate_tag!r}")
    if gate_tag not in qcal.gates:
        raise KeyError(f"calibration has no entry for gate {gate_tag!r}")
    gcal = qcal.gates[gate_tag]
    t_g = gcal.duration
    lam_dep = depolarizing_prob(gcal.error, t_g, params.k_dep, params.b_dep, t_char_1q, clamps)
    s = _dep_superop_1q(lam_dep)
    if gate_tag != "id":
        u = coherent_unitary_1q(params.theta_x, params.theta_y, params.theta_z, t_g, t_char_1q)
        s = s @ superop_from_unitary(u)
    lam_amp = amplitude_damping_prob(t_g, qcal.t1, params.b_amp, clamps)
    s = superop_from_kraus(amplitude_damping_kraus(lam_amp)) @ s
    t_phi = pure_dephasing_time(qcal.t1, qcal.t2)
    lam_ph = phase_flip_prob(t_g, t_phi, params.beta_1q, 0.0, clamps)
    s = _phase_superop(lam_ph) @ s
    return KrausChannel.from_superop(1, s)


def build_2q_channel(
    params: NoiseParams,
    edge: EdgeCal,
    qcals: tuple[QubitCal, QubitCal],
    t_char_2q: float,
    clamps: Counter | None = None,
    duration: float | None = None,
) -> KrausChannel:
    """Composite two-qubit gate channel, in application order: coherent
    crosstalk, two-qubit depolarizing, per-qubit amplitude damping, per-qubit
    phase flip, correlated ZZ.

    ``qcals`` follows the gate's qubit order (first, second); the returned
    operators use the local little-endian convention for that order.
    """
    t_g = edge.duration if duration is None else duration
    u = coherent_unitary_2q(params.theta_ix, params.theta_zx, params.theta_zz, t_g, t_char_2q)
    lam_dep = depolarizing_prob(
        edge.error, t_g, params.k_dep_2q, params.b_dep_2q, t_char_2q, clamps
    )
    s = _dep_superop_2q(lam_dep) @ superop_from_unitary(u)

    amp_ops = []
    ph_ops = []
    for qcal in qcals:
        lam_amp = amplitude_damping_prob(t_g, qcal.t1, params.b_amp_2q, clamps)
        amp_ops.append(amplitude_damping_kraus(lam_amp))
        t_phi = pure_dephasing_time(qcal.t1, qcal.t2)
        lam_ph = phase_flip_prob(t_g, t_phi, params.beta_2q, params.b_phi_2q, clamps)
        ph_ops.append(phase_flip_kraus(lam_ph))
    s = superop_from_kraus([two_site(a, b) for a in amp_ops[0] for b in amp_ops[1]]) @ s
    s = superop_from_kraus([two_site(a, b) for a in ph_ops[0] for b in ph_ops[1]]) @ s

    lam_zz = zz_prob(t_g, params.k_zz, t_char_2q, clamps)
    s = _zz_superop(lam_zz) @ s
    return KrausChannel.from_superop(2, s)


def _transfer(mat: np.ndarray, col: int, diag: int, anti: int, lam: float, clamps: Counter | None) -> None:
    # Move probability mass within one column, clamped so entries stay in [0, 1].
    eff = max(0.0, min(lam, mat[diag, col], 1.0 - mat[anti, col]))
    if eff != lam and clamps is not None:
        clamps["readout"] += 1
    mat[diag, col] -= eff
    mat[anti, col] += eff


def build_readout_model(
    params: NoiseParams,
    cal: DeviceCalibration,
    matching: PairMatching,
    clamps: Counter | None = None,
) -> ReadoutModel:
    """Correlated readout: independent tensor-product confusion matrices per
    matched pair, plus 00<->11 and 01<->10 probability-mass transfers scaled
    by the pair's average local readout error."""
    pair_matrices: dict[tuple[int, int], np.ndarray] = {}
    for q0, q1 in matching.pairs:
        m0 = single_readout_matrix(cal.qubits[q0])
        m1 = single_readout_matrix(cal.qubits[q1])
        mat = np.kron(m1, m0)  # q0 on the low bit
        e_bar = 0.5 * (cal.qubits[q0].mean_readout_error + cal.qubits[q1].mean_readout_error)
        lam_0011 = _clamp01(params.ro_a_0011 * e_bar + params.ro_b_0011, clamps, "readout")
        lam_0110 = _clamp01(params.ro_a_0110 * e_bar + params.ro_b_0110, clamps, "readout")
        # |00> column and |11> column, diagonal <-> anti-diagonal
        _transfer(mat, 0, 0, 3, lam_0011, clamps)
        _transfer(mat, 3, 3, 0, lam_0011, clamps)
        # |01> and |10> columns (state-swap errors)
        _transfer(mat, 1, 1, 2, lam_0110, clamps)
        _transfer(mat, 2, 2, 1, lam_0110, clamps)
        pair_matrices[(q0, q1)] = mat
    single_matrices = {q: single_readout_matrix(cal.qubits[q]) for q in matching.singles}
    return ReadoutModel(pair_matrices=pair_matrices, single_matrices=single_matrices)


class ParameterizedModelFamily:
    """Gate channels for one (parameters, device) pair, built once.

    Channels are global functions of the 20 parameters and the per-gate
    calibration; only the readout pairing depends on the measured set, so
    models for different measured sets share identical channels.
    """

    def __init__(self, params: NoiseParams, cal: DeviceCalibration) -> None:
        self.params = params
        self.cal = cal
        self._clamps: Counter = Counter()
        self._channels: dict[tuple[str, tuple[int, ...]], KrausChannel] = {}
        for q, qcal in enumerate(cal.qubits):
            for tag in ("id", "sx", "x"):
                if tag in qcal.gates:
                    self._channels[(tag, (q,))] = build_1q_channel(
                        params, qcal, tag, cal.t_char_1q, self._clamps
                    )
        for edge in cal.edges:
            a, b = edge.qubits
            for pair in ((a, b), (b, a)):
                qcals = (cal.qubits[pair[0]], cal.qubits[pair[1]])
                self._channels[(edge.gate_tag, pair)] = build_2q_channel(
                    params, edge, qcals, cal.t_char_2q, self._clamps
                )

    def _rebuild(self, tag: str, qubits: tuple[int, ...], duration: float) -> KrausChannel | None:
        params, cal = self.params, self.cal
        if tag in ("id", "sx", "x", "rz"):
            qcal = cal.qubits[qubits[0]]
            base = qcal.gates.get(tag)
            if tag == "rz":
                # virtual gate given a duration: decoherence-only idle window
                base_error = 0.0
            elif base is None:
                raise KeyError(f"calibration has no entry for gate {tag!r}")
            else:
                base_error = base.error
            patched = QubitCal(
                t1=qcal.t1,
                t2=qcal.t2,
                readout_p01=qcal.readout_p01,
                readout_p10=qcal.readout_p10,
                gates={"id": GateCal(error=base_error, duration=duration)},
            )
            return build_1q_channel(params, patched, "id", cal.t_char_1q)
        edge = cal.edge_for(*qubits)
        qcals = (cal.qubits[qubits[0]], cal.qubits[qubits[1]])
        return build_2q_channel(params, edge, qcals, cal.t_char_2q, duration=duration)

    def model_for(self, measured: Iterable[int]) -> NoiseModel:
        matching = greedy_pair_matching(self.cal, measured)
        clamps = Counter(self._clamps)
        readout = build_readout_model(self.params, self.cal, matching, clamps)
        return NoiseModel(
            gate_channels=self._channels,
            readout=readout,
            clamp_events=dict(clamps),
            builder=self._rebuild,
        )


def build_parameterized_model(
    params: NoiseParams,
    cal: DeviceCalibration,
    measured: Iterable[int],
) -> NoiseModel:
    """Assemble the full learnable model for a device and measured-qubit set."""
    return ParameterizedModelFamily(params, cal).model_for(measured)


# --- default (vendor-style) model -------------------------------------------


def thermal_relaxation_kraus(t_g: float, t1: float, t_phi: float) -> list[np.ndarray]:
    """Zero-temperature thermal relaxation over t_g: amplitude damping with
    p = 1 - exp(-t_g/T1) composed with the phase flip reproducing the
    exp(-t_g/T_phi) pure-dephasing envelope."""
    p_amp = 1.0 - math.exp(-t_g / t1)
    lam_z = 0.0 if math.isinf(t_phi) else 0.5 * (1.0 - math.exp(-t_g / t_phi))
    return compose_kraus([amplitude_damping_kraus(p_amp), phase_flip_kraus(lam_z)])


def average_gate_fidelity(operators: list[np.ndarray]) -> float:
    """Nielsen's trace formula: (sum_i |Tr K_i|^2 + d) / (d^2 + d)."""
    d = operators[0].shape[0]
    acc = sum(abs(np.trace(k)) ** 2 for k in operators)
    return float((acc + d) / (d * (d + 1)))


def _composite_infidelity(lam: float, thermal_ops: list[np.ndarray], arity: int) -> float:
    dep = depolarizing_kraus_1q(lam) if arity == 1 else depolarizing_kraus_2q(lam)
    products = [t @ k for t in thermal_ops for k in dep]
    return 1.0 - average_gate_fidelity(products)


def solve_default_depolarizing(
    e_g: float, thermal_ops: list[np.ndarray], arity: int
) -> tuple[float, bool]:
    """Depolarizing strength making the composite gate infidelity equal e_g.

    Returns (lambda, at_boundary). If thermal relaxation alone already
    exceeds e_g the strength is 0; if even full depolarization falls short
    it is 1. Both boundary cases are flagged.
    """
    f0 = _composite_infidelity(0.0, thermal_ops, arity)
    if f0 >= e_g:
        return 0.0, True
    f1 = _composite_infidelity(1.0, thermal_ops, arity)
    if f1 <= e_g:
        return 1.0, True
    try:
        lam = brentq(
            lambda x: _composite_infidelity(x, thermal_ops, arity) - e_g,
            0.0,
            1.0,
            xtol=1e-15,
            rtol=8.9e-16,
            maxiter=200,
        )
    except RuntimeError as exc:
        raise RuntimeError(f"depolarizing solve failed to converge: {exc}") from None
    return float(lam), False


def _default_1q_channel(qcal: QubitCal, tag: str, duration: float | None = None) -> tuple[KrausChannel, bool]:
    gcal = qcal.gates[tag]
    t_g = gcal.duration if duration is None else duration
    t_phi = pure_dephasing_time(qcal.t1, qcal.t2)
    thermal = thermal_relaxation_kraus(t_g, qcal.t1, t_phi)
    lam, boundary = solve_default_depolarizing(gcal.error, thermal, arity=1)
    ops = compose_kraus([depolarizing_kraus_1q(lam), thermal])
    return KrausChannel(arity=1, operators=tuple(ops)), boundary


def _default_2q_channel(
    edge: EdgeCal, qcals: tuple[QubitCal, QubitCal], duration: float | None = None
) -> tuple[KrausChannel, bool]:
    t_g = edge.duration if duration is None else duration
    thermal_parts = []
    for qcal in qcals:
        t_phi = pure_dephasing_time(qcal.t1, qcal.t2)
        thermal_parts.append(thermal_relaxation_kraus(t_g, qcal.t1, t_phi))
    thermal = [two_site(a, b) for a in thermal_parts[0] for b in thermal_parts[1]]
    lam, boundary = solve_default_depolarizing(edge.error, thermal, arity=2)
    ops = compose_kraus([depolarizing_kraus_2q(lam), thermal])
    return KrausChannel(arity=2, operators=tuple(ops)), boundary


class DefaultModelFamily:
    """Vendor-style baseline channels for one device, built (and the
    per-gate depolarizing strengths solved) once."""

    def __init__(self, cal: DeviceCalibration) -> None:
        self.cal = cal
        self._channels: dict[tuple[str, tuple[int, ...]], KrausChannel] = {}
        self._boundary: list[str] = []
        for q, qcal in enumerate(cal.qubits):
            for tag in ("id", "sx", "x"):
                if tag in qcal.gates:
                    ch, flag = _default_1q_channel(qcal, tag)
                    self._channels[(tag, (q,))] = ch
                    if flag:
                        self._boundary.append(f"{tag}@{q}")
        for edge in cal.edges:
            a, b = edge.qubits
            for pair in ((a, b), (b, a)):
                qcals = (cal.qubits[pair[0]], cal.qubits[pair[1]])
                ch, flag = _default_2q_channel(edge, qcals)
                self._channels[(edge.gate_tag, pair)] = ch
                if flag and pair == (a, b):
                    self._boundary.append(f"{edge.gate_tag}@{pair}")

    def _rebuild(self, tag: str, qubits: tuple[int, ...], duration: float) -> KrausChannel | None:
        if tag == "rz":
            return None
        if tag in ("id", "sx", "x"):
            ch, _ = _default_1q_channel(self.cal.qubits[qubits[0]], tag, duration)
            return ch
        edge = self.cal.edge_for(*qubits)
        qcals = (self.cal.qubits[qubits[0]], self.cal.qubits[qubits[1]])
        ch, _ = _default_2q_channel(edge, qcals, duration)
        return ch

    def model_for(self, measured: Iterable[int]) -> NoiseModel:
        singles = {q: single_readout_matrix(self.cal.qubits[q]) for q in sorted(set(measured))}
        return NoiseModel(
            gate_channels=self._channels,
            readout=ReadoutModel(pair_matrices={}, single_matrices=singles),
            boundary_gates=tuple(self._boundary),
            builder=self._rebuild,
        )


def build_default_model(cal: DeviceCalibration, measured: Iterable[int]) -> NoiseModel:
    """Vendor-style baseline: depolarizing-then-thermal gate channels with the
    depolarizing strength solved against e_g, independent readout only."""
    return DefaultModelFamily(cal).model_for(measured)
