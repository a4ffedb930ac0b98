"""Per-replica raw results and their CSV form.

List-valued columns hold ``;``-separated values; floats are written with
``repr`` so a CSV round trip is exact.  Entry indices are ``i-j`` pairs.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

CSV_COLUMNS = [
    "replica_index",
    "seed",
    "failed",
    "error",
    "top_eig",
    "bottom_eig",
    "top_entries",
    "entry_indices",
    "eig_counts",
    "entry_counts",
    "L1a",
    "L1b",
    "L1c",
    "L2",
    "norm_inf",
    "max_abs",
    "interlacing_violations",
    "perturbation",
    "spectrum_hist",
]

TIMING_COLUMNS = ["replica_index", "wall_time"]


@dataclass
class ReplicaRecord:
    replica_index: int
    seed: int
    failed: bool = False
    error: str = ""
    top_eig: list = field(default_factory=list)
    bottom_eig: list = field(default_factory=list)
    top_entries: list = field(default_factory=list)
    entry_indices: list = field(default_factory=list)
    eig_counts: list = field(default_factory=list)
    entry_counts: list = field(default_factory=list)
    L1a: Optional[bool] = None
    L1b: Optional[bool] = None
    L1c: Optional[bool] = None
    L2: Optional[bool] = None
    norm_inf: Optional[float] = None
    max_abs: Optional[float] = None
    interlacing_violations: Optional[int] = None
    perturbation: list = field(default_factory=list)
    spectrum_hist: list = field(default_factory=list)
    # kept out of records.csv so that file is byte-identical across runs
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "ReplicaRecord":
        data = dict(data)
        data["entry_indices"] = [tuple(p) for p in data.get("entry_indices", [])]
        return cls(**data)


def _fmt_float(v) -> str:
    return repr(float(v))


def _fmt_list(values, fmt=_fmt_float) -> str:
    return ";".join(fmt(v) for v in values)


def _fmt_opt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def record_to_row(rec: ReplicaRecord) -> list[str]:
    return [
        str(rec.replica_index),
        str(rec.seed),
        "1" if rec.failed else "0",
        rec.error,
        _fmt_list(rec.top_eig),
        _fmt_list(rec.bottom_eig),
        _fmt_list(rec.top_entries),
        _fmt_list(rec.entry_indices, lambda p: f"{int(p[0])}-{int(p[1])}"),
        _fmt_list(rec.eig_counts, str),
        _fmt_list(rec.entry_counts, str),
        _fmt_opt(rec.L1a),
        _fmt_opt(rec.L1b),
        _fmt_opt(rec.L1c),
        _fmt_opt(rec.L2),
        _fmt_opt(rec.norm_inf),
        _fmt_opt(rec.max_abs),
        _fmt_opt(rec.interlacing_violations),
        _fmt_list(rec.perturbation),
        _fmt_list(rec.spectrum_hist, str),
    ]


def _split(text: str, conv):
    return [conv(t) for t in text.split(";")] if text else []


def _opt(text: str, conv):
    return None if text == "" else conv(text)


def _bool(text: str) -> bool:
    return text == "1"


def row_to_record(row: dict) -> ReplicaRecord:
    return ReplicaRecord(
        replica_index=int(row["replica_index"]),
        seed=int(row["seed"]),
        failed=_bool(row["failed"]),
        error=row["error"],
        top_eig=_split(row["top_eig"], float),
        bottom_eig=_split(row["bottom_eig"], float),
        top_entries=_split(row["top_entries"], float),
        entry_indices=_split(row["entry_indices"], lambda t: tuple(int(v) for v in t.split("-"))),
        eig_counts=_split(row["eig_counts"], int),
        entry_counts=_split(row["entry_counts"], int),
        L1a=_opt(row["L1a"], _bool),
        L1b=_opt(row["L1b"], _bool),
        L1c=_opt(row["L1c"], _bool),
        L2=_opt(row["L2"], _bool),
        norm_inf=_opt(row["norm_inf"], float),
        max_abs=_opt(row["max_abs"], float),
        interlacing_violations=_opt(row["interlacing_violations"], int),
        perturbation=_split(row["perturbation"], float),
        spectrum_hist=_split(row["spectrum_hist"], int),
    )


def write_records(records, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in sorted(records, key=lambda r: r.replica_index):
            w.writerow(record_to_row(rec))
    return path


def write_timings(records, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        for rec in sorted(records, key=lambda r: r.replica_index):
            w.writerow([rec.replica_index, repr(rec.wall_time)])
    return path


def read_records(path) -> list[ReplicaRecord]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        records = [row_to_record(row) for row in reader]
    timing = path.with_name("timings.csv")
    if timing.exists():
        with timing.open(newline="") as fh:
            walls = {int(r["replica_index"]): float(r["wall_time"]) for r in csv.DictReader(fh)}
        for rec in records:
            rec.wall_time = walls.get(rec.replica_index, math.nan)
    return records
