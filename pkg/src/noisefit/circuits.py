"""Gate-level circuit representation, JSON (de)serialization and structural stats.

The gate set is fixed to {id, rz, sx, x, cx, cz, measure}. ``rz`` is a
virtual frame change (zero default duration, never noisy); measurements are
terminal per qubit. Circuits are immutable after construction and safe to
share across threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

GATE_KINDS = ("id", "rz", "sx", "x", "cx", "cz", "measure")
TWO_QUBIT_KINDS = ("cx", "cz")
SINGLE_QUBIT_KINDS = ("id", "rz", "sx", "x")


class SchemaError(ValueError):
    """A JSON document violates one of the toolkit schemas."""


@dataclass(frozen=True)
class GateOp:
    """One operation: a gate from the fixed set or a terminal measurement."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    duration_override: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise SchemaError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        expected = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != expected:
            raise SchemaError(
                f"{self.kind} expects {expected} qubit(s), got {list(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise SchemaError(f"repeated qubit in {self.kind} op: {list(self.qubits)}")
        if any(q < 0 for q in self.qubits):
            raise SchemaError(f"negative qubit index in {self.kind} op")
        if self.kind == "rz":
            if self.angle is None:
                raise SchemaError("rz requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise SchemaError(f"{self.kind} carries no angle")
        if self.duration_override is not None:
            dur = float(self.duration_override)
            if dur < 0:
                raise SchemaError("duration_override must be >= 0")
            object.__setattr__(self, "duration_override", dur)

    @property
    def is_measure(self) -> bool:
        return self.kind == "measure"


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on ``num_qubits`` qubits with terminal measurements."""

    name: str
    num_qubits: int
    ops: tuple[GateOp, ...]
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.num_qubits <= 0:
            raise SchemaError("num_qubits must be positive")
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "meta", dict(self.meta))
        for key, value in self.meta.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise SchemaError("meta must map strings to strings")
        measured: set[int] = set()
        for op in self.ops:
            for q in op.qubits:
                if q >= self.num_qubits:
                    raise SchemaError(
                        f"qubit {q} out of range for {self.num_qubits}-qubit circuit"
                    )
                if q in measured:
                    raise SchemaError(
                        f"qubit {q} used after its measurement (mid-circuit "
                        "measurement is unsupported)"
                    )
            if op.is_measure:
                measured.add(op.qubits[0])

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        """Measured qubit indices, ascending."""
        return tuple(sorted(op.qubits[0] for op in self.ops if op.is_measure))

    def gate_ops(self) -> tuple[GateOp, ...]:
        return tuple(op for op in self.ops if not op.is_measure)


@dataclass(frozen=True)
class CircuitStats:
    depth: int
    two_qubit_gates: int
    single_qubit_gates: int


def parse_circuit(doc: Mapping[str, Any]) -> Circuit:
    """Build a validated Circuit from a schema-conformant dict.

    Schema: ``{name, num_qubits, ops: [{kind, qubits, angle?,
    duration_override?}], meta?}``.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("circuit document must be a JSON object")
    unknown = set(doc) - {"name", "num_qubits", "ops", "meta"}
    if unknown:
        raise SchemaError(f"unknown circuit fields: {sorted(unknown)}")
    try:
        num_qubits = int(doc["num_qubits"])
        raw_ops = doc["ops"]
    except KeyError as exc:
        raise SchemaError(f"missing circuit field: {exc.args[0]}") from None
    if not isinstance(raw_ops, list):
        raise SchemaError("ops must be an array")
    ops = []
    for i, raw in enumerate(raw_ops):
        if not isinstance(raw, Mapping):
            raise SchemaError(f"op {i} must be an object")
        extra = set(raw) - {"kind", "qubits", "angle", "duration_override"}
        if extra:
            raise SchemaError(f"op {i} has unknown fields: {sorted(extra)}")
        try:
            ops.append(
                GateOp(
                    kind=raw["kind"],
                    qubits=tuple(raw["qubits"]),
                    angle=raw.get("angle"),
                    duration_override=raw.get("duration_override"),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"op {i} missing field {exc.args[0]!r}") from None
        except SchemaError as exc:
            raise SchemaError(f"op {i}: {exc}") from None
    return Circuit(
        name=str(doc.get("name", "")),
        num_qubits=num_qubits,
        ops=tuple(ops),
        meta=doc.get("meta", {}),
    )


def circuit_to_doc(circuit: Circuit) -> dict[str, Any]:
    """Inverse of :func:`parse_circuit` (round-trips exactly)."""
    ops = []
    for op in circuit.ops:
        entry: dict[str, Any] = {"kind": op.kind, "qubits": list(op.qubits)}
        if op.angle is not None:
            entry["angle"] = op.angle
        if op.duration_override is not None:
            entry["duration_override"] = op.duration_override
        ops.append(entry)
    doc: dict[str, Any] = {
        "name": circuit.name,
        "num_qubits": circuit.num_qubits,
        "ops": ops,
    }
    if circuit.meta:
        doc["meta"] = dict(circuit.meta)
    return doc


def parse_circuits(doc: Any) -> list[Circuit]:
    """Parse a single circuit object or an array of circuit objects."""
    if isinstance(doc, list):
        return [parse_circuit(entry) for entry in doc]
    return [parse_circuit(doc)]


def load_circuits(path: str | Path) -> list[Circuit]:
    """Load one circuit or an array of circuits from a UTF-8 JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from None
    return parse_circuits(doc)


def save_circuits(circuits: Iterable[Circuit], path: str | Path) -> None:
    docs = [circuit_to_doc(c) for c in circuits]
    payload: Any = docs[0] if len(docs) == 1 else docs
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def circuit_stats(circuit: Circuit) -> CircuitStats:
    """Greedy ASAP layering depth plus gate counts.

    An op enters the earliest layer in which all its qubits are free.
    Measurements count toward depth but not toward gate tallies.
    """
    free_at = [0] * circuit.num_qubits
    depth = 0
    two_q = 0
    single_q = 0
    for op in circuit.ops:
        layer = max(free_at[q] for q in op.qubits)
        for q in op.qubits:
            free_at[q] = layer + 1
        depth = max(depth, layer + 1)
        if op.kind in TWO_QUBIT_KINDS:
            two_q += 1
        elif not op.is_measure:
            single_q += 1
    return CircuitStats(depth=depth, two_qubit_gates=two_q, single_qubit_gates=single_q)
