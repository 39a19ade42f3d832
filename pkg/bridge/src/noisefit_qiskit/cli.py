"""Batch export entry point.

Reads local SDK artifacts (QPY circuit files need qiskit installed;
properties/result JSON payloads do not) and writes a directory of
noisefit schema files plus a provenance manifest.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .export import ExportError, export_calibration, export_circuit, export_counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisefit-qiskit-export",
        description="Export Qiskit circuits/calibration/counts into noisefit JSON schemas",
    )
    parser.add_argument("--qpy", help="QPY file of transpiled circuits (needs qiskit)")
    parser.add_argument("--properties", help="BackendProperties.to_dict() JSON file")
    parser.add_argument("--result", help="Result.to_dict() JSON file")
    parser.add_argument("--backend-name", default="", help="provenance: backend name")
    parser.add_argument("--job-id", default="", help="provenance: job id")
    parser.add_argument("--output", required=True, help="output directory")
    return parser


def _load_qpy(path: str):
    try:
        from qiskit import qpy
    except ImportError as exc:
        raise ExportError("reading QPY circuit files requires qiskit") from exc
    with open(path, "rb") as fh:
        return qpy.load(fh)


def run_export(args: argparse.Namespace) -> dict:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "backend_name": args.backend_name,
        "job_ids": [args.job_id] if args.job_id else [],
        "exported_at": datetime.now(timezone.utc).isoformat(),
        "circuits": [],
        "counts": [],
        "calibration": None,
    }
    circuits = []
    if args.qpy:
        circuits = list(_load_qpy(args.qpy))
        (out / "circuits").mkdir(exist_ok=True)
        for i, circuit in enumerate(circuits):
            doc = export_circuit(circuit)
            name = doc["name"] or f"circuit_{i}"
            doc["name"] = name
            rel = f"circuits/{name}.json"
            (out / rel).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
            manifest["circuits"].append(rel)
    if args.properties:
        payload = json.loads(Path(args.properties).read_text(encoding="utf-8"))
        doc = export_calibration(payload)
        (out / "calibration.json").write_text(
            json.dumps(doc, indent=1) + "\n", encoding="utf-8"
        )
        manifest["calibration"] = "calibration.json"
    if args.result:
        payload = json.loads(Path(args.result).read_text(encoding="utf-8"))
        experiments = payload.get("results", [None])
        (out / "counts").mkdir(exist_ok=True)
        for index in range(len(experiments)):
            header = {}
            if experiments[index] is not None:
                header = experiments[index].get("header", {})
            width = header.get("memory_slots")
            if width is None:
                if not circuits:
                    raise ExportError(
                        "result lacks memory_slots and no circuits were given to "
                        "infer the bitstring width"
                    )
                width = len(
                    [op for op in export_circuit(circuits[index])["ops"] if op["kind"] == "measure"]
                )
            doc = export_counts(payload, width=int(width), experiment=index)
            name = header.get("name") or f"counts_{index}"
            rel = f"counts/{name}.json"
            (out / rel).write_text(json.dumps(doc) + "\n", encoding="utf-8")
            manifest["counts"].append(rel)
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=1) + "\n", encoding="utf-8"
    )
    return manifest


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = run_export(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    print(json.dumps({"output": args.output, "files": len(manifest["circuits"]) + len(manifest["counts"])}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
