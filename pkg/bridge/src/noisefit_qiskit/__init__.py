"""One-way bridge from the Qiskit ecosystem into noisefit's JSON schemas."""

from .export import ExportError, export_calibration, export_circuit, export_counts

__all__ = ["ExportError", "export_calibration", "export_circuit", "export_counts"]
