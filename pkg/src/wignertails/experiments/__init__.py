"""Replicated experiments, reports and the command line."""
from .config import KINDS, ExperimentConfig
from .records import CSV_COLUMNS, ReplicaRecord, read_records, write_records
from .report import Report, emit_report
from .runner import ExperimentError, run_experiment

__all__ = [
    "CSV_COLUMNS",
    "KINDS",
    "ExperimentConfig",
    "ExperimentError",
    "ReplicaRecord",
    "Report",
    "emit_report",
    "read_records",
    "run_experiment",
    "write_records",
]
