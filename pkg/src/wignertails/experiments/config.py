"""Experiment configuration (JSON files)."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from ..limit_laws import Interval
from ..tail_laws import TailLaw, parse_law

KINDS = (
    "eigen_frechet",
    "entry_frechet",
    "poisson_counts",
    "topk_matching",
    "lemma_events",
    "cb_density",
    "semicircle_contrast",
)


@dataclass
class ExperimentConfig:
    experiment_kind: str
    n: int
    replicas: int
    law_spec: str = "pareto:alpha=1.0"
    k_top: int = 10
    intervals: list = field(default_factory=lambda: [[1.0, 2.0], [2.0, 3.0], [3.0, None]])
    master_seed: int = 20240607
    output_dir: str = "runs/default"
    name: str = ""
    workers: int = 1
    # criterion id -> threshold; null disables a default criterion
    criteria: dict = field(default_factory=dict)
    delta: float = 1.0 / 16.0
    check_interlacing: bool = False
    oracle_draws: int = 100_000
    svg: bool = True
    cb: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment_kind not in KINDS:
            raise ValueError(f"unknown experiment_kind {self.experiment_kind!r}; choose from {KINDS}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if int(self.replicas) != self.replicas or self.replicas < 1:
            raise ValueError("replicas must be an integer >= 1")
        if not 1 <= self.k_top <= self.n:
            raise ValueError("k_top must lie in [1, n]")
        self.law  # validates the spec string
        ivs = sorted(self.interval_objects, key=lambda iv: iv.c)
        for left, right in zip(ivs, ivs[1:]):
            if right.c < left.d:
                raise ValueError("intervals must be disjoint")

    @property
    def law(self) -> TailLaw:
        return parse_law(self.law_spec)

    @property
    def interval_objects(self) -> list[Interval]:
        return [Interval(float(c), math.inf if d is None else float(d)) for c, d in self.intervals]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path, output_dir: Optional[str] = None) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        if output_dir is not None:
            data["output_dir"] = output_dir
        return cls.from_dict(data)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
