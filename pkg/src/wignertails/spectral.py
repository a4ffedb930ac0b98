"""Top of the spectrum of ``A / b_n`` and the principal-submatrix construction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .ensemble import OrderStats, WignerSample

__all__ = [
    "EigenSolverError",
    "InterlacingError",
    "SpectralSummary",
    "top_eigenvalues",
    "principal_submatrix_top",
    "interlacing_violations",
    "perturbation_residuals",
]

_KEEP_ALL_MAX_N = 64


class EigenSolverError(RuntimeError):
    """The dense symmetric eigensolver failed to converge."""


class InterlacingError(AssertionError):
    pass


@dataclass(frozen=True)
class SpectralSummary:
    n: int
    b_n: float
    k: int
    top_pos: np.ndarray
    bottom_neg: np.ndarray
    residual: float
    all_eigenvalues: Optional[np.ndarray] = None


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    try:
        return scipy.linalg.eigh(a, eigvals_only=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc


def top_eigenvalues(sample: WignerSample, k: int, b_n: float, keep_all: bool = False) -> SpectralSummary:
    """Largest and smallest ``k`` eigenvalues of ``A / b_n``.

    The whole spectrum is computed (LAPACK tridiagonal reduction) and divided
    by ``b_n`` afterwards.  The top eigenpair is recomputed with eigenvectors
    to certify ``||A v / b_n - lambda_1 v|| <= 1e-8 max(1, |lambda_1|)``.
    """
    n = sample.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    a = sample.entries
    evals = _eigvalsh(a) / b_n
    lam1 = evals[-1]

    try:
        _, vec = scipy.linalg.eigh(a, subset_by_index=[n - 1, n - 1], check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    v = vec[:, 0]
    residual = float(np.linalg.norm(a @ v / b_n - lam1 * v))
    if residual > 1e-8 * max(1.0, abs(lam1)):
        raise EigenSolverError(f"top eigenpair residual {residual:.3e} too large")

    norm_inf = np.abs(a).sum(axis=1).max() / b_n
    if lam1 > norm_inf * (1 + 1e-12):
        raise EigenSolverError(f"lambda_1={lam1} exceeds ||A||_inf/b_n={norm_inf}")

    keep = keep_all or n <= _KEEP_ALL_MAX_N
    return SpectralSummary(
        n=n,
        b_n=float(b_n),
        k=k,
        top_pos=evals[::-1][:k].copy(),
        bottom_neg=evals[:k].copy(),
        residual=residual,
        all_eigenvalues=evals if keep else None,
    )


def _check_index(n: int, delete_index: int) -> None:
    if not 0 <= delete_index < n:
        raise IndexError(f"delete_index must lie in [0, {n - 1}], got {delete_index}")


def principal_submatrix_top(sample: WignerSample, delete_index: int, k: int, b_n: float,
                            full: Optional[np.ndarray] = None) -> np.ndarray:
    """Top ``k`` eigenvalues of ``A`` with row/column ``delete_index`` removed,
    divided by ``b_n``.  Asserts ``lambda_2 <= mu_1 <= lambda_1``.

    ``full`` may carry the already computed normalized spectrum of ``A``.
    """
    n = sample.n
    _check_index(n, delete_index)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    keep = np.delete(np.arange(n), delete_index)
    sub = _eigvalsh(sample.entries[np.ix_(keep, keep)]) / b_n
    if full is None:
        full = _eigvalsh(sample.entries) / b_n
    lam1, lam2 = full[-1], full[-2]
    mu1 = sub[-1]
    slack = 1e-9 * max(1.0, abs(lam1))
    if not (lam2 - slack <= mu1 <= lam1 + slack):
        raise InterlacingError(f"mu_1={mu1} outside [{lam2}, {lam1}] (row {delete_index})")
    return sub[::-1][:k].copy()


def interlacing_violations(sample: WignerSample, b_n: float) -> int:
    """Count delete indices where ``lambda_2 <= mu_1 <= lambda_1`` fails."""
    full = _eigvalsh(sample.entries) / b_n
    bad = 0
    for idx in range(sample.n):
        try:
            principal_submatrix_top(sample, idx, 1, b_n, full=full)
        except InterlacingError:
            bad += 1
    return bad


def perturbation_residuals(sample: WignerSample, stats: OrderStats) -> np.ndarray:
    """``||A f_l / b_n - a^(l) f_l||`` for each order statistic; NaN on the diagonal."""
    a = sample.entries
    out = np.full(stats.k, np.nan)
    for l, (i, j) in enumerate(stats.indices):
        if i == j:
            continue
        f = np.zeros(sample.n)
        f[i] = 1.0 / np.sqrt(2.0)
        f[j] = (1.0 if a[i, j] >= 0 else -1.0) / np.sqrt(2.0)
        out[l] = np.linalg.norm(a @ f / stats.b_n - stats.values[l] * f)
    return out
