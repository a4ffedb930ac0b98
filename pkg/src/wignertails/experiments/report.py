"""Report container and writers (JSON, records CSV, SVG histograms).

JSON layout::

    {
      "config": {...},              # ExperimentConfig echo
      "b_n": float,
      "n_records": int, "n_failed": int,
      "runtime_seconds": float,
      "statistics": {...},          # kind-specific, see analysis.py
      "criteria": [{"id", "description", "value", "threshold",
                    "comparison", "passed"}, ...],
      "passed": bool,
      "versions": {...}, "created": ISO-8601 string,
      "records": [ReplicaRecord as dict, ...]
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .records import ReplicaRecord, write_records


@dataclass
class Report:
    config: dict
    b_n: float
    statistics: dict
    criteria: list
    n_records: int
    n_failed: int
    runtime_seconds: float
    versions: dict = field(default_factory=dict)
    created: str = ""
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.criteria)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "b_n": self.b_n,
            "n_records": self.n_records,
            "n_failed": self.n_failed,
            "runtime_seconds": self.runtime_seconds,
            "statistics": self.statistics,
            "criteria": self.criteria,
            "passed": self.passed,
            "versions": self.versions,
            "created": self.created,
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        data = dict(data)
        data.pop("passed", None)
        data["records"] = [ReplicaRecord.from_dict(r) for r in data.get("records", [])]
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.criteria:
            mark = "PASS" if c["passed"] else "FAIL"
            lines.append(f"[{mark}] {c['id']}: {c['description']} "
                         f"(value={_short(c['value'])} {c['comparison']} {_short(c['threshold'])})")
        return lines


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    return v


def _svg_figure(path: Path, draw) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "wignertails"
    fig, ax = plt.subplots(figsize=(6, 4))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def available_histograms(report: Report) -> list[str]:
    recs = [r for r in report.records if not r.failed]
    names = []
    if any(r.top_eig for r in recs) and report.config["experiment_kind"] not in ("cb_density", "semicircle_contrast"):
        names.append("lambda1")
    if any(r.top_entries for r in recs):
        names.append("entry1")
    if any(r.spectrum_hist for r in recs):
        names.append("spectrum")
    return names


def _draw_histogram(report: Report, name: str, ax) -> None:
    from ..limit_laws import frechet_pdf
    from ..tail_laws import parse_law
    from .runner import HIST_EDGES

    alpha = parse_law(report.config["law_spec"]).alpha
    recs = [r for r in report.records if not r.failed]
    if name in ("lambda1", "entry1"):
        vals = np.array([r.top_eig[0] if name == "lambda1" else r.top_entries[0] for r in recs])
        hi = float(np.quantile(vals, 0.95)) if vals.size else 1.0
        bins = np.linspace(0.0, max(hi, 1.0), 40)
        ax.hist(vals[vals <= bins[-1]], bins=bins, density=False,
                weights=np.full(np.count_nonzero(vals <= bins[-1]), 1.0 / max(vals.size, 1) / (bins[1] - bins[0])),
                alpha=0.6, label="empirical")
        xs = np.linspace(bins[1] / 4, bins[-1], 400)
        ax.plot(xs, frechet_pdf(alpha, xs), "k-", label=f"Frechet density, alpha={alpha:g}")
        ax.set_xlabel("largest eigenvalue" if name == "lambda1" else "largest normalized entry")
    else:
        counts = np.sum([r.spectrum_hist for r in recs], axis=0)
        total = counts.sum()
        widths = np.diff(HIST_EDGES)
        dens = counts[1:-1] / max(total, 1) / widths
        ax.stairs(dens, HIST_EDGES, label="empirical spectrum")
        model = report.statistics.get("model_density")
        if model:
            ax.plot(model["x"], model["f"], "k-", label=model["label"])
        ax.set_xlabel("eigenvalue / n^(1/alpha)")
    ax.set_ylabel("density")
    ax.legend()


def emit_report(report: Report, out_dir, formats=("json", "csv", "svg"),
                histograms: Optional[list] = None) -> dict:
    """Write the requested artifacts; returns ``{format: [paths]}``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written: dict = {}
    if "json" in formats:
        path = out / "report.json"
        path.write_text(report.to_json() + "\n")
        written["json"] = [path]
    if "csv" in formats:
        written["csv"] = [write_records(report.records, out / "records.csv")]
    if "svg" in formats:
        names = available_histograms(report) if histograms is None else list(histograms)
        paths = []
        for name in names:
            paths.append(_svg_figure(out / f"hist_{name}.svg",
                                     lambda ax, name=name: _draw_histogram(report, name, ax)))
        written["svg"] = paths
    return written
