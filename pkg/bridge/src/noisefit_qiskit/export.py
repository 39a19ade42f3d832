"""Convert Qiskit-ecosystem objects into the noisefit JSON schemas.

Everything here duck-types Qiskit's public access patterns
(``circuit.data`` with ``instruction.operation`` / ``circuit.find_bit``,
``BackendProperties.to_dict()`` payloads, ``Result.to_dict()`` payloads),
so the module works with real Qiskit objects when the SDK is installed and
with schema-equivalent dictionaries when it is not.

Output conventions match the toolkit: qubit 0 is the least significant bit
and bitstrings render with qubit 0 rightmost. The bridge is one-directional
(SDK to toolkit); fitted parameters flow back as the 20-field JSON, which
needs no SDK types.
"""
from __future__ import annotations

from typing import Any, Mapping

SUPPORTED_GATES = {"id", "rz", "sx", "x", "cx", "cz"}
DROPPED_OPS = {"barrier"}

_TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}


class ExportError(ValueError):
    pass


def _bit_index(circuit: Any, bit: Any) -> int:
    return circuit.find_bit(bit).index


def export_circuit(circuit: Any, name: str | None = None) -> dict[str, Any]:
    """Translate a transpiled circuit into the toolkit circuit schema.

    The circuit must already use the toolkit basis {id, rz, sx, x, cx, cz,
    measure}; barriers are dropped. Measurements must map qubit i to clbit
    i, the identity wiring ``measure_all`` produces, so that count
    bitstrings keep their qubit order.
    """
    ops: list[dict[str, Any]] = []
    for instruction in circuit.data:
        operation = instruction.operation
        gate = operation.name
        if gate in DROPPED_OPS:
            continue
        qubits = [_bit_index(circuit, q) for q in instruction.qubits]
        if gate == "measure":
            clbits = [_bit_index(circuit, c) for c in instruction.clbits]
            if clbits != qubits:
                raise ExportError(
                    f"measurement maps qubit {qubits} to clbit {clbits}; only the "
                    "identity qubit-to-clbit wiring is supported"
                )
            ops.append({"kind": "measure", "qubits": qubits})
            continue
        if gate not in SUPPORTED_GATES:
            raise ExportError(
                f"gate {gate!r} is outside the toolkit basis; transpile to "
                "{id, rz, sx, x, cx, cz} first"
            )
        entry: dict[str, Any] = {"kind": gate, "qubits": qubits}
        if gate == "rz":
            if len(operation.params) != 1:
                raise ExportError("rz must carry exactly one angle")
            entry["angle"] = float(operation.params[0])
        elif operation.params:
            raise ExportError(f"gate {gate!r} carries unexpected parameters")
        ops.append(entry)
    return {
        "name": name or getattr(circuit, "name", "") or "",
        "num_qubits": int(circuit.num_qubits),
        "ops": ops,
    }


def _to_seconds(value: float, unit: str) -> float:
    try:
        return float(value) * _TIME_UNITS[unit or "s"]
    except KeyError:
        raise ExportError(f"unknown time unit {unit!r}") from None


def _properties_dict(properties: Any) -> Mapping[str, Any]:
    if isinstance(properties, Mapping):
        return properties
    to_dict = getattr(properties, "to_dict", None)
    if to_dict is None:
        raise ExportError("properties must be a mapping or expose to_dict()")
    return to_dict()


def export_calibration(
    properties: Any,
    t_char_1q: float | None = None,
    t_char_2q: float | None = None,
) -> dict[str, Any]:
    """Translate a backend-properties payload into the calibration schema.

    Accepts a ``BackendProperties`` object or its ``to_dict()`` form:
    per-qubit parameter lists carrying T1/T2/readout probabilities and a
    flat gate list carrying gate_error/gate_length. Times normalize to
    seconds. Two-qubit entries must be cx or cz.
    """
    doc = _properties_dict(properties)
    try:
        raw_qubits = doc["qubits"]
        raw_gates = doc["gates"]
    except KeyError as exc:
        raise ExportError(f"properties payload lacks {exc.args[0]!r}") from None

    qubits: list[dict[str, Any]] = []
    for index, entries in enumerate(raw_qubits):
        values: dict[str, float] = {}
        for entry in entries:
            unit = entry.get("unit", "")
            name = entry["name"]
            if name in ("T1", "T2"):
                values[name] = _to_seconds(entry["value"], unit or "us")
            elif name in ("prob_meas1_prep0", "prob_meas0_prep1", "readout_error"):
                values[name] = float(entry["value"])
        missing = [k for k in ("T1", "T2") if k not in values]
        if missing:
            raise ExportError(f"qubit {index} lacks {missing} in properties")
        p01 = values.get("prob_meas1_prep0")
        p10 = values.get("prob_meas0_prep1")
        if p01 is None or p10 is None:
            # fall back to the symmetric readout_error when the asymmetric
            # probabilities are absent from the snapshot
            symmetric = values.get("readout_error")
            if symmetric is None:
                raise ExportError(f"qubit {index} lacks readout probabilities")
            p01 = p10 = symmetric
        qubits.append(
            {
                "t1": values["T1"],
                "t2": values["T2"],
                "readout_p01": p01,
                "readout_p10": p10,
                "gates": {},
            }
        )

    edges: dict[tuple[int, int], dict[str, Any]] = {}
    for gate in raw_gates:
        gate_name = gate["gate"]
        gate_qubits = [int(q) for q in gate["qubits"]]
        params = {p["name"]: p for p in gate.get("parameters", [])}
        if "gate_error" not in params or "gate_length" not in params:
            raise ExportError(
                f"gate {gate_name} on {gate_qubits} lacks gate_error/gate_length"
            )
        error = float(params["gate_error"]["value"])
        duration = _to_seconds(
            params["gate_length"]["value"], params["gate_length"].get("unit", "ns")
        )
        if len(gate_qubits) == 1:
            if gate_name in ("id", "rz", "sx", "x"):
                qubits[gate_qubits[0]]["gates"][gate_name] = {
                    "error": error,
                    "duration": duration,
                }
            continue  # other single-qubit basis gates are not part of the schema
        if len(gate_qubits) == 2:
            if gate_name not in ("cx", "cz"):
                raise ExportError(
                    f"two-qubit gate {gate_name!r} is outside the toolkit basis"
                )
            key = (min(gate_qubits), max(gate_qubits))
            # keep the worse direction when both are reported
            if key not in edges or error > edges[key]["error"]:
                edges[key] = {
                    "qubits": list(key),
                    "gate": gate_name,
                    "error": error,
                    "duration": duration,
                }
            continue
        raise ExportError(f"{len(gate_qubits)}-qubit gate {gate_name!r} unsupported")

    out: dict[str, Any] = {
        "num_qubits": len(qubits),
        "qubits": qubits,
        "edges": [edges[k] for k in sorted(edges)],
    }
    if t_char_1q is not None:
        out["t_char_1q"] = float(t_char_1q)
    if t_char_2q is not None:
        out["t_char_2q"] = float(t_char_2q)
    return out


def _normalize_key(key: str, width: int) -> str:
    key = key.replace(" ", "")
    if key.startswith("0x") or key.startswith("0X"):
        return format(int(key, 16), f"0{width}b")
    if not set(key) <= {"0", "1"}:
        raise ExportError(f"count key {key!r} is neither binary nor hex")
    if len(key) > width:
        raise ExportError(f"count key {key!r} wider than {width} bits")
    return key.zfill(width)


def export_counts(result: Any, width: int, experiment: int = 0) -> dict[str, Any]:
    """Translate executed-job counts into the toolkit counts schema.

    Accepts a plain ``{"shots": N, "counts": {...}}`` mapping, a
    ``Result.to_dict()`` payload (hex keys allowed), or an object exposing
    ``get_counts()``. ``width`` fixes the bitstring width (qubit 0
    rightmost); totals must match the declared shots.
    """
    doc: Mapping[str, Any]
    if isinstance(result, Mapping):
        if "results" in result:
            exp = result["results"][experiment]
            doc = {"shots": exp["shots"], "counts": exp["data"]["counts"]}
        else:
            doc = result
    else:
        get_counts = getattr(result, "get_counts", None)
        if get_counts is None:
            raise ExportError("result must be a mapping or expose get_counts()")
        counts = get_counts(experiment)
        doc = {"shots": sum(counts.values()), "counts": counts}
    try:
        shots = int(doc["shots"])
        raw = doc["counts"]
    except KeyError as exc:
        raise ExportError(f"result payload lacks {exc.args[0]!r}") from None
    table: dict[str, int] = {}
    for key, value in raw.items():
        bits = _normalize_key(str(key), width)
        table[bits] = table.get(bits, 0) + int(value)
    total = sum(table.values())
    if total != shots:
        raise ExportError(f"counts sum to {total}, result declares {shots} shots")
    return {"shots": shots, "counts": dict(sorted(table.items()))}
