"""Reference limit laws: Frechet, Poisson order statistics, semicircle."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrechetLaw",
    "Interval",
    "frechet_cdf",
    "frechet_pdf",
    "order_stat_cdf",
    "order_stat_cdf_printed",
    "poisson_mean",
    "sample_poisson_process",
    "sample_poisson_process_batch",
    "semicircle_density",
]


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")


@dataclass(frozen=True)
class FrechetLaw:
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    def cdf(self, x):
        return frechet_cdf(self.alpha, x)

    def pdf(self, x):
        return frechet_pdf(self.alpha, x)


@dataclass(frozen=True)
class Interval:
    """Open interval ``(c, d)`` on the positive half-line; ``d`` may be ``inf``."""

    c: float
    d: float = math.inf

    def __post_init__(self):
        if not 0.0 < self.c < self.d:
            raise ValueError(f"need 0 < c < d, got ({self.c}, {self.d})")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.c) & (x < self.d)


def frechet_cdf(alpha: float, x):
    """``exp(-x**-alpha)`` for ``x > 0``, zero otherwise."""
    _check_alpha(alpha)
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    pos = xa > 0
    out[pos] = np.exp(-xa[pos] ** -alpha)
    return out if out.ndim else float(out)


def frechet_pdf(alpha: float, x):
    _check_alpha(alpha)
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    pos = xa > 0
    out[pos] = alpha * xa[pos] ** (-1 - alpha) * np.exp(-xa[pos] ** -alpha)
    return out if out.ndim else float(out)


def order_stat_cdf(alpha: float, k: int, x):
    """Limit of ``Pr(a^(k) <= x)``: at most ``k-1`` Poisson points above ``x``.

    ``exp(-x**-alpha) * sum_{l=0}^{k-1} x**(-l*alpha) / l!``
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k}")
    _check_alpha(alpha)
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    pos = xa > 0
    mu = xa[pos] ** -alpha
    partial = sum(mu ** l / math.factorial(l) for l in range(int(k)))
    out[pos] = np.exp(-mu) * partial
    return out if out.ndim else float(out)


def order_stat_cdf_printed(alpha: float, k: int, x):
    """The same sum started at ``l = 1``; vanishes at ``k = 1``.  Kept for reports."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k}")
    _check_alpha(alpha)
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    pos = xa > 0
    mu = xa[pos] ** -alpha
    out[pos] = np.exp(-mu) * sum(mu ** l / math.factorial(l) for l in range(1, int(k)))
    return out if out.ndim else float(out)


def poisson_mean(alpha: float, interval: Interval) -> float:
    """Integral of ``alpha / x**(1+alpha)`` over the interval."""
    _check_alpha(alpha)
    upper = 0.0 if math.isinf(interval.d) else interval.d ** -alpha
    return interval.c ** -alpha - upper


def sample_poisson_process(alpha: float, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Points above ``epsilon`` of the process with intensity ``alpha/x**(1+alpha)``.

    ``N ~ Poisson(epsilon**-alpha)``, then ``x = epsilon * U**(-1/alpha)``;
    returned in descending order.
    """
    _check_alpha(alpha)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    count = rng.poisson(epsilon ** -alpha)
    u = 1.0 - rng.random(count)
    return np.sort(epsilon * u ** (-1.0 / alpha))[::-1]


def sample_poisson_process_batch(alpha: float, epsilon: float, draws: int,
                                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``draws`` independent realizations at once.

    Returns ``(points, owner)`` where ``owner[i]`` is the realization index of
    ``points[i]``; all counts are drawn first, then all point uniforms.
    """
    _check_alpha(alpha)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    counts = rng.poisson(epsilon ** -alpha, size=draws)
    u = 1.0 - rng.random(int(counts.sum()))
    return epsilon * u ** (-1.0 / alpha), np.repeat(np.arange(draws), counts)


def semicircle_density(sigma: float, t):
    """``sqrt(2 sigma^2 - t^2) / (pi sigma^2)`` on ``|t| <= sqrt(2) sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    ta = np.asarray(t, dtype=float)
    out = np.sqrt(np.clip(2 * sigma * sigma - ta * ta, 0.0, None)) / (math.pi * sigma * sigma)
    return out if out.ndim else float(out)
