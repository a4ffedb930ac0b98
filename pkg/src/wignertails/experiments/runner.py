"""Replicated experiment driver.

Replica ``r`` uses seed ``mix_seed(master_seed, r)``; records are folded in
index order, so results do not depend on the worker count.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..ensemble import entry_order_stats, mix_seed, row_diagnostics, sample_matrix, top_entry_stats
from ..spectral import EigenSolverError, interlacing_violations, perturbation_residuals, top_eigenvalues
from ..stat_tests import count_in_intervals
from ..tail_laws import solve_bn
from .config import ExperimentConfig
from .records import ReplicaRecord, write_records, write_timings

log = logging.getLogger(__name__)

HIST_EDGES = np.linspace(-5.0, 5.0, 51)
MAX_FAILURE_FRACTION = 0.01


class ExperimentError(RuntimeError):
    """The run could not produce a trustworthy report."""


_EIGEN_KINDS = {"eigen_frechet", "poisson_counts", "topk_matching"}
_SPECTRUM_KINDS = {"cb_density", "semicircle_contrast"}


def spectrum_histogram(eigenvalues: np.ndarray) -> list[int]:
    """Counts below ``-5``, in 50 bins over ``[-5, 5]``, and above ``5``."""
    inner, _ = np.histogram(eigenvalues, bins=HIST_EDGES)
    below = int(np.count_nonzero(eigenvalues < HIST_EDGES[0]))
    above = int(np.count_nonzero(eigenvalues > HIST_EDGES[-1]))
    return [below] + [int(c) for c in inner] + [above]


def run_replica(config: ExperimentConfig, index: int, b_n: float) -> ReplicaRecord:
    start = time.perf_counter()
    law = config.law
    seed = mix_seed(config.master_seed, index)
    rec = ReplicaRecord(replica_index=index, seed=seed)
    intervals = config.interval_objects
    kind = config.experiment_kind

    if kind == "entry_frechet":
        stats = entry_order_stats(law, config.n, seed, config.k_top, b_n)
        rec.top_entries = stats.values.tolist()
        rec.entry_indices = [tuple(int(v) for v in p) for p in stats.indices]
        rec.entry_counts = count_in_intervals(stats.values, intervals).tolist()
        rec.wall_time = time.perf_counter() - start
        return rec

    sample = sample_matrix(law, config.n, seed)
    stats = top_entry_stats(sample, config.k_top, b_n)
    rec.top_entries = stats.values.tolist()
    rec.entry_indices = [tuple(int(v) for v in p) for p in stats.indices]
    rec.entry_counts = count_in_intervals(stats.values, intervals).tolist()
    absa = np.abs(sample.entries)
    rec.norm_inf = float(absa.sum(axis=1).max())
    rec.max_abs = float(absa.max())

    try:
        if kind in _EIGEN_KINDS:
            spec = top_eigenvalues(sample, config.k_top, b_n)
            rec.top_eig = spec.top_pos.tolist()
            rec.bottom_eig = spec.bottom_neg.tolist()
            rec.eig_counts = count_in_intervals(spec.top_pos, intervals).tolist()
            if kind == "topk_matching":
                rec.perturbation = perturbation_residuals(sample, stats).tolist()
                if config.check_interlacing:
                    rec.interlacing_violations = interlacing_violations(sample, b_n)
        elif kind == "lemma_events":
            diag = row_diagnostics(sample, b_n, law.alpha, delta=config.delta)
            rec.L1a, rec.L1b, rec.L1c, rec.L2 = (diag.flags[k] for k in ("L1a", "L1b", "L1c", "L2"))
        elif kind in _SPECTRUM_KINDS:
            bulk_scale = config.n ** (1.0 / law.alpha)
            spec = top_eigenvalues(sample, config.k_top, bulk_scale, keep_all=True)
            rec.top_eig = (spec.top_pos * bulk_scale / b_n).tolist()
            rec.spectrum_hist = spectrum_histogram(spec.all_eigenvalues)
    except EigenSolverError as exc:
        log.warning("replica %d: eigensolver failure: %s", index, exc)
        rec.failed = True
        rec.error = str(exc).replace("\n", " ")
    rec.wall_time = time.perf_counter() - start
    return rec


def _replica_job(args):
    config_dict, index, b_n = args
    return run_replica(ExperimentConfig.from_dict(config_dict), index, b_n)


def run_replicas(config: ExperimentConfig, b_n: float) -> list[ReplicaRecord]:
    indices = range(config.replicas)
    if config.workers <= 1:
        records = [run_replica(config, i, b_n) for i in indices]
    else:
        jobs = [(config.to_dict(), i, b_n) for i in indices]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_replica_job, jobs, chunksize=max(1, len(jobs) // (8 * config.workers))))
    return sorted(records, key=lambda r: r.replica_index)


def run_experiment(config: ExperimentConfig, persist: bool = True):
    """Run all replicas, persist ``records.csv`` (then ``timings.csv`` and
    ``config.json``) and aggregate into a :class:`Report`."""
    from .analysis import build_report

    b_n = solve_bn(config.law, config.n)
    log.info("%s: n=%d R=%d b_n=%.6g", config.experiment_kind, config.n, config.replicas, b_n)
    out = Path(config.output_dir)
    if persist:
        out.mkdir(parents=True, exist_ok=True)
        config.save(out / "config.json")

    t0 = time.perf_counter()
    records = run_replicas(config, b_n)
    runtime = time.perf_counter() - t0
    if persist:
        write_records(records, out / "records.csv")
        write_timings(records, out / "timings.csv")

    n_failed = sum(r.failed for r in records)
    if n_failed > MAX_FAILURE_FRACTION * len(records):
        raise ExperimentError(f"{n_failed} of {len(records)} replicas failed (limit 1%)")
    return build_report(config, records, b_n=b_n, runtime=runtime, cache_dir=out if persist else None)
