"""Aggregate replica records into statistics and pass/fail criteria."""
from __future__ import annotations

import logging
import math
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from .. import __version__
from ..ensemble import mix_seed
from ..limit_laws import (
    frechet_cdf,
    order_stat_cdf,
    order_stat_cdf_printed,
    poisson_mean,
    sample_poisson_process_batch,
    semicircle_density,
)
from ..stable_cb import (
    StableParams,
    cb_density,
    cb_iterate,
    cb_normalization,
    load_solution,
    save_solution,
    stable_density,
    stable_normalization,
)
from ..stat_tests import (
    MIN_CORRELATION_ROWS,
    MIN_KS_SIZE,
    coarse_independence_tv,
    ks_statistic,
    pairwise_count_correlation,
    poisson_count_test,
)
from ..tail_laws import survival
from .config import ExperimentConfig
from .report import Report
from .runner import HIST_EDGES

log = logging.getLogger(__name__)

DEFAULT_CRITERIA = {
    "entry_frechet": {
        "ks_a1_D_max": 0.04,
        "ks_a1_p_min": 0.01,
        "runtime_max_s": 120.0,
        "oracle_k2_max_err": 0.01,
        "ks_a2_D_max": 0.05,
    },
    "eigen_frechet": {"ks_lambda1_D_max": 0.08, "runtime_max_s": 900.0},
    "poisson_counts": {"count_z_max": 4.0, "count_corr_max": 0.1, "count_tv_max": 0.05},
    "topk_matching": {"median_ratio_max": 0.05, "match_freq_min": 0.8, "interlacing_max": 0},
    "lemma_events": {"flag_freq_max": 0.05, "norm_ratio_frac_min": 0.95},
    "cb_density": {"cb_residual_max": 1e-2, "cb_norm_tol": 0.05, "cauchy_max_err": 1e-6, "stable_norm_tol": 1e-4,
                   "cb_tv_max": 0.15},
    "semicircle_contrast": {},
}

MATCH_TOL = 0.05
MATCH_LEVELS = 3
NORM_RATIO_MAX = 1.1
ORACLE_POINTS = (0.5, 1.0, 2.0)
STABLE_NORM_CASES = ((0.5, 0.0), (0.75, 0.5))


def _criterion(cid: str, description: str, value, threshold, comparison: str) -> dict:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        passed = False
    elif comparison == "<=":
        passed = value <= threshold
    elif comparison == ">=":
        passed = value >= threshold
    elif comparison == "==":
        passed = value == threshold
    else:
        raise ValueError(comparison)
    out = {
        "id": cid,
        "description": description,
        "value": value,
        "threshold": threshold,
        "comparison": comparison,
        "passed": bool(passed),
    }
    if value is None:
        out["degenerate"] = True
    return out


def _thresholds(config: ExperimentConfig) -> dict:
    merged = dict(DEFAULT_CRITERIA[config.experiment_kind])
    merged.update(config.criteria)
    return {k: v for k, v in merged.items() if v is not None}


def _ks(values, cdf) -> dict:
    values = np.asarray(values, dtype=float)
    if values.size < MIN_KS_SIZE:
        return {"D": None, "p": None, "R": int(values.size), "degenerate": True}
    d, p = ks_statistic(values, cdf)
    return {"D": d, "p": p, "R": int(values.size), "degenerate": False}


def _count_tests(counts: np.ndarray, config: ExperimentConfig, alpha: float) -> dict:
    intervals = config.interval_objects
    out = {"intervals": [[iv.c, None if math.isinf(iv.d) else iv.d] for iv in intervals], "per_interval": []}
    for l, iv in enumerate(intervals):
        mu = poisson_mean(alpha, iv)
        col = counts[:, l] if counts.size else np.array([], dtype=int)
        if col.size == 0:
            out["per_interval"].append({"mu": mu, "mean": None, "z_mean": None, "tv": None})
            continue
        z, tv = poisson_count_test(col, mu)
        out["per_interval"].append({"mu": mu, "mean": float(col.mean()), "z_mean": z, "tv": tv})
    if counts.ndim == 2 and counts.shape[0] >= MIN_CORRELATION_ROWS and counts.shape[1] >= 2:
        corr, degenerate = pairwise_count_correlation(counts)
        off = corr[~np.eye(corr.shape[0], dtype=bool)]
        out["correlation"] = corr.tolist()
        out["degenerate_columns"] = degenerate.tolist()
        out["max_abs_correlation"] = float(np.max(np.abs(off)))
        out["coarse_tv_adjacent"] = [coarse_independence_tv(counts[:, l], counts[:, l + 1])
                                     for l in range(counts.shape[1] - 1)]
    else:
        out["max_abs_correlation"] = None
        out["correlation_degenerate"] = True
    return out


def _count_criteria(stats: dict, th: dict, prefix: str) -> list:
    crits = []
    for l, row in enumerate(stats["per_interval"]):
        z = None if row["z_mean"] is None else abs(row["z_mean"])
        if "count_z_max" in th:
            crits.append(_criterion(f"{prefix}_z_{l}", f"|z_mean| of {prefix} counts in interval {l}",
                                    z, th["count_z_max"], "<="))
        if "count_tv_max" in th:
            crits.append(_criterion(f"{prefix}_tv_{l}", f"TV to Poisson pmf of {prefix} counts in interval {l}",
                                    row["tv"], th["count_tv_max"], "<="))
    if "count_corr_max" in th:
        crits.append(_criterion(f"{prefix}_corr", f"max pairwise |correlation| of {prefix} counts",
                                stats["max_abs_correlation"], th["count_corr_max"], "<="))
    return crits


def _oracle_k2(alpha: float, draws: int, seed: int) -> dict:
    rng = np.random.Generator(np.random.PCG64(seed))
    eps = min(ORACLE_POINTS)
    points, owner = sample_poisson_process_batch(alpha, eps, draws, rng)
    rows = []
    for x in ORACLE_POINTS:
        above = np.bincount(owner[points > x], minlength=draws)
        mc = float(np.mean(above <= 1))
        exact = order_stat_cdf(alpha, 2, x)
        rows.append({"x": x, "monte_carlo": mc, "analytic": exact, "abs_err": abs(mc - exact)})
    return {
        "draws": draws,
        "rows": rows,
        "max_abs_err": max(r["abs_err"] for r in rows),
        "printed_sum_k2_x1": order_stat_cdf_printed(alpha, 2, 1.0),
        "corrected_sum_k2_x1": order_stat_cdf(alpha, 2, 1.0),
    }


def _model_bin_probs(density, total_mass: float) -> tuple[np.ndarray, float]:
    """Probability per histogram bin (plus outside mass) for a density."""
    probs = []
    for lo, hi in zip(HIST_EDGES[:-1], HIST_EDGES[1:]):
        xs = np.linspace(lo, hi, 21)
        probs.append(np.trapezoid(density(xs), xs))
    probs = np.array(probs) / total_mass
    return probs, max(0.0, 1.0 - probs.sum())


def _spectrum_tv(records, probs: np.ndarray, outside: float) -> float:
    counts = np.sum([r.spectrum_hist for r in records], axis=0).astype(float)
    emp = counts / counts.sum()
    emp_out = emp[0] + emp[-1]
    return 0.5 * float(np.abs(emp[1:-1] - probs).sum() + abs(emp_out - outside))


def _cb_solution(config: ExperimentConfig, cache_dir: Optional[Path]):
    opts = config.cb
    span = float(opts.get("grid_span", 10.0))
    m = int(opts.get("grid_points", 201))
    cached = cache_dir / "cb_solution.csv" if cache_dir is not None else None
    if cached is not None and cached.exists():
        sol = load_solution(cached)
        if sol.grid.size == m and abs(sol.span - span) < 1e-12:
            return sol
    alpha = config.law.alpha
    sol = cb_iterate(alpha, np.linspace(-span, span, m), max_iters=int(opts.get("max_iters", 200)),
                     tol=float(opts.get("tol", 1e-3)), damping=float(opts.get("damping", 0.5)))
    if cached is not None:
        save_solution(sol, cached)
    return sol


def cb_assessment(sol) -> dict:
    """Residuals, symmetry and normalization of a CB solution."""
    f = sol.density_values
    res = max(sol.residual.get("C", math.nan), sol.residual.get("beta", math.nan))
    asym_C = float(np.max(np.abs(sol.C_values - sol.C_values[::-1])))
    asym_f = float(np.max(np.abs(f - f[::-1])))
    return {
        "status": sol.status,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "max_residual": res,
        "clamp_counts": sol.clamp_counts,
        "asymmetry_C": asym_C,
        "asymmetry_f": asym_f,
        "normalization": cb_normalization(sol),
        "last_changes": sol.history[-5:],
    }


def cb_criterion(assess: dict, th: dict) -> dict:
    """Pass on a converged solution meeting residual, symmetry and mass
    bounds, or on an iteration that was reported as diverged."""
    res = assess["max_residual"]
    converged_ok = (
        assess["status"] == "converged"
        and res <= th["cb_residual_max"]
        and assess["asymmetry_C"] <= 2 * res
        and assess["asymmetry_f"] <= 2 * res
        and abs(assess["normalization"] - 1.0) <= th["cb_norm_tol"]
    )
    diverged_ok = assess["status"] == "diverged" and len(assess["last_changes"]) > 0
    crit = _criterion("cb_solution", "CB fixed point converged (residual, symmetry, mass) or divergence reported",
                      1.0 if (converged_ok or diverged_ok) else 0.0, 1.0, ">=")
    crit["detail"] = {k: assess[k] for k in ("status", "max_residual", "asymmetry_C", "asymmetry_f", "normalization")}
    return crit


def stable_checks(th: dict) -> tuple[dict, list]:
    xs = np.round(np.arange(-100, 101) * 0.1, 10)
    cauchy = float(np.max(np.abs(stable_density(StableParams(1.0, 1.0, 0.0), xs) - 1.0 / (math.pi * (1 + xs * xs)))))
    norms = {f"{a},{b}": stable_normalization(StableParams(a, 1.0, b)) for a, b in STABLE_NORM_CASES}
    crits = [_criterion("stable_cauchy", "max |stable density - Cauchy| on [-10, 10] step 0.1",
                        cauchy, th["cauchy_max_err"], "<=")]
    for key, mass in norms.items():
        crits.append(_criterion(f"stable_norm_{key}", f"|mass - 1| of stable density (alpha,beta)=({key})",
                                abs(mass - 1.0), th["stable_norm_tol"], "<="))
    return {"cauchy_max_err": cauchy, "normalization": norms}, crits


def build_report(config: ExperimentConfig, records, b_n: float, runtime: float,
                 cache_dir: Optional[Path] = None) -> Report:
    kind = config.experiment_kind
    th = _thresholds(config)
    law = config.law
    alpha = law.alpha
    good = [r for r in sorted(records, key=lambda r: r.replica_index) if not r.failed]
    stats: dict = {"b_n": b_n, "n_used": len(good)}
    crits: list = []

    if "runtime_max_s" in th:
        crits.append(_criterion("runtime", "wall time of all replicas (s)", runtime, th["runtime_max_s"], "<="))

    if kind == "entry_frechet":
        a1 = [r.top_entries[0] for r in good]
        a2 = [r.top_entries[1] for r in good if len(r.top_entries) > 1]
        stats["ks_a1"] = _ks(a1, lambda x: frechet_cdf(alpha, x))
        stats["ks_a2"] = _ks(a2, lambda x: order_stat_cdf(alpha, 2, x))
        stats["entry_counts"] = _count_tests(np.array([r.entry_counts for r in good]), config, alpha)
        stats["oracle_k2"] = _oracle_k2(alpha, config.oracle_draws, mix_seed(config.master_seed, 2 ** 32))
        if "ks_a1_D_max" in th:
            crits.append(_criterion("ks_a1_D", "KS distance of a^(1) vs Frechet", stats["ks_a1"]["D"],
                                    th["ks_a1_D_max"], "<="))
        if "ks_a1_p_min" in th:
            crits.append(_criterion("ks_a1_p", "KS p-value of a^(1) vs Frechet", stats["ks_a1"]["p"],
                                    th["ks_a1_p_min"], ">="))
        if "oracle_k2_max_err" in th:
            crits.append(_criterion("oracle_k2", "max |order_stat_cdf(k=2) - Poisson oracle| at x=0.5,1,2",
                                    stats["oracle_k2"]["max_abs_err"], th["oracle_k2_max_err"], "<="))
        if "ks_a2_D_max" in th:
            crits.append(_criterion("ks_a2_D", "KS distance of a^(2) vs order_stat_cdf(k=2)", stats["ks_a2"]["D"],
                                    th["ks_a2_D_max"], "<="))

    elif kind in ("eigen_frechet", "poisson_counts", "topk_matching"):
        lam1 = np.array([r.top_eig[0] for r in good])
        a1 = np.array([r.top_entries[0] for r in good])
        stats["ks_lambda1"] = _ks(lam1, lambda x: frechet_cdf(alpha, x))
        stats["ks_a1"] = _ks(a1, lambda x: frechet_cdf(alpha, x))
        eig_counts = np.array([r.eig_counts for r in good])
        stats["eig_counts"] = _count_tests(eig_counts, config, alpha)
        stats["entry_counts"] = _count_tests(np.array([r.entry_counts for r in good]), config, alpha)
        c_min = min(iv.c for iv in config.interval_objects)
        stats["saturated_replicas"] = int(sum(r.top_eig[-1] > c_min for r in good))
        if kind == "eigen_frechet" and "ks_lambda1_D_max" in th:
            crits.append(_criterion("ks_lambda1_D", "KS distance of lambda_1 vs Frechet", stats["ks_lambda1"]["D"],
                                    th["ks_lambda1_D_max"], "<="))
        if kind == "poisson_counts":
            crits.extend(_count_criteria(stats["eig_counts"], th, "eig"))
        if kind == "topk_matching":
            levels = min(MATCH_LEVELS, config.k_top)
            ratios = np.array([[r.top_eig[l] / r.top_entries[l] for l in range(levels)] for r in good])
            dev = np.abs(ratios - 1.0)
            stats["median_abs_ratio_dev"] = [float(np.median(dev[:, l])) for l in range(levels)]
            stats["match_freq"] = float(np.mean(np.all(dev <= MATCH_TOL, axis=1))) if good else None
            pert = np.array([r.perturbation[:levels] for r in good]) if good and good[0].perturbation else None
            stats["perturbation_median"] = (np.nanmedian(pert, axis=0).tolist() if pert is not None else None)
            if "median_ratio_max" in th:
                crits.append(_criterion("median_ratio", "median |lambda_1/a^(1) - 1|",
                                        stats["median_abs_ratio_dev"][0], th["median_ratio_max"], "<="))
            if "match_freq_min" in th:
                crits.append(_criterion("match_freq", f"freq of |lambda_l/a^(l) - 1| <= {MATCH_TOL} for l<={levels}",
                                        stats["match_freq"], th["match_freq_min"], ">="))
            if config.check_interlacing:
                total = int(sum(r.interlacing_violations or 0 for r in good))
                stats["interlacing_violations"] = total
                if "interlacing_max" in th:
                    crits.append(_criterion("interlacing", "interlacing violations over all delete indices",
                                            total, th["interlacing_max"], "<="))

    elif kind == "lemma_events":
        freqs = {k: float(np.mean([getattr(r, k) for r in good])) if good else None
                 for k in ("L1a", "L1b", "L1c", "L2")}
        ratio = np.array([r.norm_inf / r.max_abs for r in good])
        frac = float(np.mean((ratio >= 1.0) & (ratio <= NORM_RATIO_MAX))) if good else None
        n = config.n
        stats["flag_frequencies"] = freqs
        stats["norm_ratio_frac"] = frac
        stats["norm_ratio_median"] = float(np.median(ratio)) if good else None
        # exact law of the diagonal event, for comparison with its frequency
        stats["L1a_exact_probability"] = float(1.0 - (1.0 - survival(law, b_n ** 0.55)) ** n)
        for k, v in freqs.items():
            if "flag_freq_max" in th:
                crits.append(_criterion(f"freq_{k}", f"frequency of row-structure event {k}", v, th["flag_freq_max"], "<="))
        if "norm_ratio_frac_min" in th:
            crits.append(_criterion("norm_ratio", f"fraction with ||A||_inf / max|a_ij| in [1, {NORM_RATIO_MAX}]",
                                    frac, th["norm_ratio_frac_min"], ">="))

    elif kind in ("cb_density", "semicircle_contrast"):
        sigma = float(config.cb.get("sigma", 1.0))
        sc_probs, sc_out = _model_bin_probs(lambda x: semicircle_density(sigma, x), 1.0)
        stats["semicircle_sigma"] = sigma
        stats["semicircle_tv"] = _spectrum_tv(good, sc_probs, sc_out) if good else None
        xs = np.linspace(-5, 5, 401)
        stats["model_density"] = {"x": xs.tolist(), "f": semicircle_density(sigma, xs).tolist(),
                                  "label": f"semicircle, sigma={sigma:g}"}
        if kind == "cb_density":
            sol = _cb_solution(config, cache_dir)
            assess = cb_assessment(sol)
            stats["cb"] = assess
            total = assess["normalization"]
            probs, out = _model_bin_probs(lambda x: cb_density(sol, x)[0], total)
            stats["cb_spectrum_tv"] = _spectrum_tv(good, probs, out) if good else None
            stats["model_density"] = {"x": xs.tolist(), "f": (cb_density(sol, xs)[0] / total).tolist(),
                                      "label": "CB density (renormalized)"}
            if "cb_residual_max" in th:
                crits.append(cb_criterion(assess, th))
            if "cb_tv_max" in th:
                crits.append(_criterion("cb_spectrum_tv", "TV between spectrum histogram on [-5, 5] and CB density",
                                        stats["cb_spectrum_tv"], th["cb_tv_max"], "<="))
            if "cauchy_max_err" in th:
                stats["stable"], extra = stable_checks(th)
                crits.extend(extra)

    return Report(
        config=config.to_dict(),
        b_n=b_n,
        statistics=stats,
        criteria=crits,
        n_records=len(records),
        n_failed=len(records) - len(good),
        runtime_seconds=runtime,
        versions={
            "wignertails": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        records=sorted(records, key=lambda r: r.replica_index),
    )
