"""Device calibration snapshots and derived quantities.

A snapshot carries per-qubit coherence times and readout errors, per-gate
error rates and durations, and the coupling map. ``t_char_1q`` /
``t_char_2q`` are the characteristic gate times that make the decay-rate
formulas dimensionless; when absent they default to the device median
duration of the corresponding gate arity.
"""
from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .circuits import SINGLE_QUBIT_KINDS, TWO_QUBIT_KINDS, SchemaError


@dataclass(frozen=True)
class GateCal:
    error: float
    duration: float


@dataclass(frozen=True)
class QubitCal:
    t1: float
    t2: float
    readout_p01: float  # P(measure 1 | true 0)
    readout_p10: float  # P(measure 0 | true 1)
    gates: Mapping[str, GateCal] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, t in (("t1", self.t1), ("t2", self.t2)):
            if not (math.isfinite(t) and t > 0):
                raise SchemaError(f"non-physical {label}: {t}")
        for label, p in (("readout_p01", self.readout_p01), ("readout_p10", self.readout_p10)):
            if not 0.0 <= p <= 1.0:
                raise SchemaError(f"{label} outside [0, 1]: {p}")
        object.__setattr__(self, "gates", dict(self.gates))
        for tag, g in self.gates.items():
            if tag not in SINGLE_QUBIT_KINDS:
                raise SchemaError(f"unknown single-qubit gate tag {tag!r} in calibration")
            if not 0.0 <= g.error <= 1.0:
                raise SchemaError(f"gate {tag} error outside [0, 1]: {g.error}")
            if g.duration < 0:
                raise SchemaError(f"gate {tag} duration negative: {g.duration}")

    @property
    def mean_readout_error(self) -> float:
        return 0.5 * (self.readout_p01 + self.readout_p10)


@dataclass(frozen=True)
class EdgeCal:
    qubits: tuple[int, int]  # stored sorted, the pair is unordered
    gate_tag: str
    error: float
    duration: float

    def __post_init__(self) -> None:
        a, b = self.qubits
        if a == b:
            raise SchemaError("edge endpoints must be distinct")
        object.__setattr__(self, "qubits", (min(a, b), max(a, b)))
        if self.gate_tag not in TWO_QUBIT_KINDS:
            raise SchemaError(f"edge gate must be cx or cz, got {self.gate_tag!r}")
        if not 0.0 <= self.error <= 1.0:
            raise SchemaError(f"edge error outside [0, 1]: {self.error}")
        if self.duration < 0:
            raise SchemaError(f"edge duration negative: {self.duration}")


@dataclass(frozen=True)
class DeviceCalibration:
    num_qubits: int
    qubits: tuple[QubitCal, ...]
    edges: tuple[EdgeCal, ...]
    t_char_1q: float
    t_char_2q: float

    def __post_init__(self) -> None:
        if len(self.qubits) != self.num_qubits:
            raise SchemaError("qubit calibration count does not match num_qubits")
        for label, t in (("t_char_1q", self.t_char_1q), ("t_char_2q", self.t_char_2q)):
            if not (math.isfinite(t) and t > 0):
                raise SchemaError(f"{label} must be finite positive, got {t}")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            a, b = e.qubits
            if b >= self.num_qubits:
                raise SchemaError(f"edge {e.qubits} references unknown qubit")
            if e.qubits in seen:
                raise SchemaError(f"duplicate edge {e.qubits}")
            seen.add(e.qubits)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "edges", tuple(self.edges))

    def edge_for(self, a: int, b: int) -> EdgeCal:
        key = (min(a, b), max(a, b))
        for e in self.edges:
            if e.qubits == key:
                return e
        raise KeyError(f"no calibrated edge {key}")

    def coupling_pairs(self) -> list[tuple[int, int]]:
        return sorted(e.qubits for e in self.edges)


@dataclass(frozen=True)
class PairMatching:
    """Disjoint coupled qubit pairs plus leftover singles, partitioning the measured set."""

    pairs: tuple[tuple[int, int], ...]
    singles: tuple[int, ...]


def pure_dephasing_time(t1: float, t2: float) -> float:
    """Pure dephasing time from 1/T2 = 1/(2 T1) + 1/T_phi.

    Returns ``math.inf`` when 1/T2 <= 1/(2 T1); such snapshots occur in real
    calibration feeds through measurement noise and are accepted.
    """
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 and t2 must be positive")
    rate = 1.0 / t2 - 0.5 / t1
    if rate <= 0.0:
        return math.inf
    return 1.0 / rate


def greedy_pair_matching(cal: DeviceCalibration, measured: Iterable[int]) -> PairMatching:
    """Maximal matching of the coupling map induced on the measured qubits.

    Edges are scanned in (min index, max index) order; a pair is accepted iff
    both endpoints are still unmatched. Deterministic across runs/platforms.
    """
    measured_set = set(int(q) for q in measured)
    for q in measured_set:
        if not 0 <= q < cal.num_qubits:
            raise ValueError(f"measured qubit {q} not on device")
    matched: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for a, b in cal.coupling_pairs():
        if a in measured_set and b in measured_set and a not in matched and b not in matched:
            pairs.append((a, b))
            matched.update((a, b))
    singles = tuple(sorted(measured_set - matched))
    return PairMatching(pairs=tuple(pairs), singles=singles)


def _median_duration(durations: list[float]) -> float | None:
    durations = [d for d in durations if d > 0]
    if not durations:
        return None
    return float(statistics.median(durations))


def parse_calibration(doc: Mapping[str, Any]) -> DeviceCalibration:
    """Build a validated DeviceCalibration from a schema-conformant dict.

    Schema: ``{num_qubits, t_char_1q?, t_char_2q?, qubits: [{t1, t2,
    readout_p01, readout_p10, gates: {tag: {error, duration}}}],
    edges: [{qubits: [a, b], gate, error, duration}]}``. Missing t_char
    values default to the median listed duration of that arity; rz entries
    (virtual, zero duration) are excluded from the median.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("calibration document must be a JSON object")
    unknown = set(doc) - {"num_qubits", "t_char_1q", "t_char_2q", "qubits", "edges"}
    if unknown:
        raise SchemaError(f"unknown calibration fields: {sorted(unknown)}")
    try:
        num_qubits = int(doc["num_qubits"])
        raw_qubits = doc["qubits"]
    except KeyError as exc:
        raise SchemaError(f"missing calibration field: {exc.args[0]}") from None

    qubits = []
    for idx, raw in enumerate(raw_qubits):
        try:
            gates = {
                tag: GateCal(error=float(g["error"]), duration=float(g["duration"]))
                for tag, g in raw.get("gates", {}).items()
            }
            qubits.append(
                QubitCal(
                    t1=float(raw["t1"]),
                    t2=float(raw["t2"]),
                    readout_p01=float(raw["readout_p01"]),
                    readout_p10=float(raw["readout_p10"]),
                    gates=gates,
                )
            )
        except KeyError as exc:
            raise SchemaError(f"qubit {idx} missing field {exc.args[0]!r}") from None
        except SchemaError as exc:
            raise SchemaError(f"qubit {idx}: {exc}") from None

    edges = []
    for idx, raw in enumerate(doc.get("edges", [])):
        try:
            a, b = raw["qubits"]
            edges.append(
                EdgeCal(
                    qubits=(int(a), int(b)),
                    gate_tag=raw["gate"],
                    error=float(raw["error"]),
                    duration=float(raw["duration"]),
                )
            )
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"edge {idx}: {exc}") from None
        except SchemaError as exc:
            raise SchemaError(f"edge {idx}: {exc}") from None

    t_char_1q = doc.get("t_char_1q")
    if t_char_1q is None:
        t_char_1q = _median_duration(
            [g.duration for q in qubits for tag, g in q.gates.items() if tag != "rz"]
        )
        if t_char_1q is None:
            raise SchemaError("t_char_1q missing and no single-qubit durations to default from")
    t_char_2q = doc.get("t_char_2q")
    if t_char_2q is None:
        t_char_2q = _median_duration([e.duration for e in edges])
        if t_char_2q is None:
            raise SchemaError("t_char_2q missing and no edge durations to default from")

    return DeviceCalibration(
        num_qubits=num_qubits,
        qubits=tuple(qubits),
        edges=tuple(edges),
        t_char_1q=float(t_char_1q),
        t_char_2q=float(t_char_2q),
    )


def calibration_to_doc(cal: DeviceCalibration) -> dict[str, Any]:
    return {
        "num_qubits": cal.num_qubits,
        "t_char_1q": cal.t_char_1q,
        "t_char_2q": cal.t_char_2q,
        "qubits": [
            {
                "t1": q.t1,
                "t2": q.t2,
                "readout_p01": q.readout_p01,
                "readout_p10": q.readout_p10,
                "gates": {
                    tag: {"error": g.error, "duration": g.duration}
                    for tag, g in sorted(q.gates.items())
                },
            }
            for q in cal.qubits
        ],
        "edges": [
            {
                "qubits": list(e.qubits),
                "gate": e.gate_tag,
                "error": e.error,
                "duration": e.duration,
            }
            for e in cal.edges
        ],
    }


def load_calibration(path: str | Path) -> DeviceCalibration:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from None
    return parse_calibration(doc)


def save_calibration(cal: DeviceCalibration, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(calibration_to_doc(cal), fh, indent=1)
        fh.write("\n")
