"""Wigner matrices with heavy-tailed entries and their entry-level statistics.

Indices are 0-based throughout.  The upper triangle (diagonal included) is
filled row-major, ``(0,0), (0,1), ..., (0,n-1), (1,1), ...``, each entry
consuming two uniforms from a PCG64 stream (see
:func:`wignertails.tail_laws.sample_entry`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .tail_laws import TailLaw, quantile, sample_entries

__all__ = [
    "mix_seed",
    "WignerSample",
    "OrderStats",
    "RowDiagnostics",
    "sample_matrix",
    "top_entry_stats",
    "entry_order_stats",
    "build_test_vector",
    "row_diagnostics",
    "dump_matrix",
    "load_matrix",
]

_MASK64 = (1 << 64) - 1


def mix_seed(master_seed: int, replica_index: int) -> int:
    """SplitMix64 output for state ``master_seed + (replica_index + 1) * golden``."""
    z = (int(master_seed) + (int(replica_index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclass(frozen=True)
class WignerSample:
    n: int
    entries: np.ndarray = field(repr=False)
    seed: Optional[int] = None
    law: Optional[TailLaw] = None

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.shape != (self.n, self.n):
            raise ValueError(f"entries must be {self.n}x{self.n}, got {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("entries must be exactly symmetric")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_array(cls, entries, law: Optional[TailLaw] = None) -> "WignerSample":
        a = np.asarray(entries, dtype=float)
        return cls(n=a.shape[0], entries=a, law=law)


@dataclass(frozen=True)
class OrderStats:
    """Top-``k`` normalized entry magnitudes over the upper triangle."""

    k: int
    values: np.ndarray
    indices: np.ndarray  # (k, 2) with i <= j
    b_n: float


@dataclass(frozen=True)
class RowDiagnostics:
    row_max: np.ndarray
    row_sum: np.ndarray
    remainder: np.ndarray
    flags: dict
    norm_inf: float
    max_abs: float


def sample_matrix(law: TailLaw, n: int, seed: int) -> WignerSample:
    if int(n) != n or n < 2:
        raise ValueError(f"matrix dimension must be an integer >= 2, got {n}")
    n = int(n)
    iu = np.triu_indices(n)
    vals = sample_entries(law, _rng(seed), iu[0].size)
    a = np.empty((n, n))
    a[iu] = vals
    a.T[iu] = vals
    return WignerSample(n=n, entries=a, seed=int(seed), law=law)


def _n_upper(n: int) -> int:
    return n * (n + 1) // 2


def _flat_to_pairs(flat: np.ndarray, n: int) -> np.ndarray:
    rows = np.arange(n)
    offsets = rows * n - rows * (rows - 1) // 2
    i = np.searchsorted(offsets, flat, side="right") - 1
    j = flat - offsets[i] + i
    return np.column_stack([i, j])


def _top_k_flat(score: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores, ties to the smaller flat index."""
    if k < score.size:
        kth = np.partition(score, score.size - k)[score.size - k]
        cand = np.flatnonzero(score >= kth)
    else:
        cand = np.arange(score.size)
    order = np.lexsort((cand, -score[cand]))
    return cand[order[:k]]


def top_entry_stats(sample: WignerSample, k: int, b_n: float) -> OrderStats:
    n = sample.n
    if not 1 <= k <= _n_upper(n):
        raise ValueError(f"k must lie in [1, {_n_upper(n)}], got {k}")
    mags = np.abs(sample.entries[np.triu_indices(n)])
    flat = _top_k_flat(mags, k)
    return OrderStats(k=k, values=mags[flat] / b_n, indices=_flat_to_pairs(flat, n), b_n=float(b_n))


def entry_order_stats(law: TailLaw, n: int, seed: int, k: int, b_n: float) -> OrderStats:
    """Same result as ``top_entry_stats(sample_matrix(law, n, seed), k, b_n)``
    without assembling the matrix.

    Magnitudes are decreasing in ``u``, so the top entries are the ``k``
    smallest ``u`` draws; only those are pushed through the quantile.
    """
    n_up = _n_upper(int(n))
    if not 1 <= k <= n_up:
        raise ValueError(f"k must lie in [1, {n_up}], got {k}")
    # smallest u = 1 - r are the largest raw r; 1 - r is exact, so ties carry over
    r = _rng(seed).random(2 * n_up)[0::2]
    cand = np.flatnonzero(r > 1.0 - 64.0 * k / n_up)
    if cand.size >= k:
        flat = cand[_top_k_flat(r[cand], k)]
    else:
        flat = _top_k_flat(r, k)
    mags = np.asarray(quantile(law, 1.0 - r[flat]), dtype=float).reshape(k)
    # quantile is monotone, but equal magnitudes from distinct u keep index order
    order = np.lexsort((flat, -mags))
    flat, mags = flat[order], mags[order]
    return OrderStats(k=k, values=mags / b_n, indices=_flat_to_pairs(flat, int(n)), b_n=float(b_n))


def build_test_vector(sample: WignerSample, entry_index) -> tuple[np.ndarray, float]:
    """Unit vector ``f`` supported on ``{i, j}`` aligned with ``sign(a_ij)``.

    Returns ``(f, (A f, f))``; the quadratic form equals
    ``|a_ij| + a_ii/2 + a_jj/2``.
    """
    i, j = (int(t) for t in entry_index)
    if i == j:
        raise ValueError("test vectors need an off-diagonal entry (i != j)")
    a = sample.entries
    f = np.zeros(sample.n)
    f[i] = 1.0 / np.sqrt(2.0)
    f[j] = (1.0 if a[i, j] >= 0 else -1.0) / np.sqrt(2.0)
    closed = abs(a[i, j]) + 0.5 * a[i, i] + 0.5 * a[j, j]
    direct = float(f @ (a @ f))
    scale = max(abs(closed), abs(a[i, j]), np.finfo(float).tiny)
    if abs(direct - closed) > 1e-10 * scale:
        raise ArithmeticError(f"quadratic form mismatch: {direct} vs {closed}")
    return f, closed


def row_diagnostics(sample: WignerSample, b_n: float, alpha: Optional[float] = None,
                    delta: float = 1.0 / 16.0) -> RowDiagnostics:
    """Per-row maxima and sums plus the row-structure event flags.

    Flags: ``L1a`` a diagonal entry above ``b_n**(11/20)``; ``L1b`` a pair
    ``i < j`` with ``|a_ij| > b_n**0.99`` and ``|a_ii| + |a_jj| > b_n**0.1``;
    ``L1c`` a row with two entries above ``b_n**(3/4 + delta)``; ``L2`` a row
    whose maximum and remaining sum both exceed ``b_n**(3/4 + alpha/8)``.
    """
    if alpha is None:
        if sample.law is None:
            raise ValueError("alpha is required when the sample carries no law")
        alpha = sample.law.alpha
    absa = np.abs(sample.entries)
    row_max = absa.max(axis=1)
    row_sum = absa.sum(axis=1)
    remainder = row_sum - row_max
    diag = np.diag(absa)

    big = absa > b_n ** 0.99
    np.fill_diagonal(big, False)
    pair_diag = diag[:, None] + diag[None, :]
    l2_thr = b_n ** (0.75 + alpha / 8.0)
    flags = {
        "L1a": bool(np.any(diag > b_n ** (11.0 / 20.0))),
        "L1b": bool(np.any(big & (pair_diag > b_n ** 0.1))),
        "L1c": bool(np.any((absa > b_n ** (0.75 + delta)).sum(axis=1) >= 2)),
        "L2": bool(np.any((row_max > l2_thr) & (remainder > l2_thr))),
    }
    return RowDiagnostics(
        row_max=row_max,
        row_sum=row_sum,
        remainder=remainder,
        flags=flags,
        norm_inf=float(row_sum.max()),
        max_abs=float(row_max.max()),
    )


def dump_matrix(sample: WignerSample, path) -> None:
    """Plain text: ``n`` then the upper triangle row-major, 17 significant digits."""
    vals = sample.entries[np.triu_indices(sample.n)]
    lines = [str(sample.n)] + [f"{v:.17g}" for v in vals]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path, law: Optional[TailLaw] = None) -> WignerSample:
    tokens = Path(path).read_text().split()
    n = int(tokens[0])
    vals = np.array([float(t) for t in tokens[1:]])
    if vals.size != _n_upper(n):
        raise ValueError(f"expected {_n_upper(n)} values for n={n}, found {vals.size}")
    a = np.empty((n, n))
    iu = np.triu_indices(n)
    a[iu] = vals
    a.T[iu] = vals
    return WignerSample(n=n, entries=a, law=law)
