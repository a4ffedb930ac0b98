"""Heavy-tailed entry laws ``Pr(|a| > x) = h(x) / x**alpha``.

Two slowly varying factors are provided: a constant ``h = c`` (pure Pareto)
and ``h(x) = log(e + x)**beta``.  Magnitudes live on ``[x_min, inf)`` where
``x_min`` is chosen so that the survival function starts at one and is
strictly decreasing afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy import optimize

__all__ = [
    "ConstantH",
    "LogPowerH",
    "TailLaw",
    "survival",
    "quantile",
    "sample_entry",
    "sample_entries",
    "solve_bn",
    "parse_law",
]

_BISECT_RTOL = 1e-13


@dataclass(frozen=True)
class ConstantH:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"ConstantH needs c > 0, got {self.c}")

    def log_h(self, x):
        return np.full_like(np.asarray(x, dtype=float), math.log(self.c))


@dataclass(frozen=True)
class LogPowerH:
    beta: float = 1.0

    def __post_init__(self):
        if not -1.0 <= self.beta <= 1.0:
            raise ValueError(f"LogPowerH needs beta in [-1, 1], got {self.beta}")

    def log_h(self, x):
        return self.beta * np.log(np.log(math.e + np.asarray(x, dtype=float)))


Variant = Union[ConstantH, LogPowerH]


@dataclass(frozen=True)
class TailLaw:
    """Law of ``|a_ij|`` with survival ``h(x) / x**alpha`` above ``x_min``.

    ``x_min`` and the normalizing constant are derived, not user supplied.
    For ``LogPowerH`` with ``beta > 0`` and small ``alpha`` the raw tail
    ``h(x)/x**alpha`` rises before it decays; ``x_min`` is then moved past
    the last rising point and the tail is divided by its value there, which
    keeps ``h`` slowly varying.
    """

    alpha: float
    variant: Variant = field(default_factory=ConstantH)
    x_min: float = field(init=False)
    log_norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if isinstance(self.variant, ConstantH):
            x_min, log_norm = self.variant.c ** (1.0 / self.alpha), 0.0
        elif isinstance(self.variant, LogPowerH):
            x_min, log_norm = _logpower_support(self.alpha, self.variant.beta)
        else:
            raise TypeError(f"unknown tail variant {self.variant!r}")
        object.__setattr__(self, "x_min", float(x_min))
        object.__setattr__(self, "log_norm", float(log_norm))

    def log_tail(self, x):
        """``log(h(x)/x**alpha)`` minus the normalizing constant, unclamped."""
        x = np.asarray(x, dtype=float)
        return self.variant.log_h(x) - self.alpha * np.log(x) - self.log_norm

    @property
    def spec(self) -> str:
        if isinstance(self.variant, ConstantH):
            if self.variant.c == 1.0:
                return f"pareto:alpha={self.alpha!r}"
            return f"pareto:alpha={self.alpha!r},c={self.variant.c!r}"
        return f"logpareto:alpha={self.alpha!r},beta={self.variant.beta!r}"


def _logpower_support(alpha: float, beta: float) -> tuple[float, float]:
    def raw(x):
        return beta * math.log(math.log(math.e + x)) - alpha * math.log(x)

    # d log G / d log x = beta * phi(x) - alpha
    def phi(x):
        return x / ((math.e + x) * math.log(math.e + x))

    last_rise = 0.0
    if beta > 0:
        res = optimize.minimize_scalar(lambda s: -phi(math.exp(s)), bounds=(-5, 40), method="bounded")
        x_peak = math.exp(res.x)
        if beta * phi(x_peak) >= alpha:
            hi = x_peak
            while beta * phi(hi) >= alpha:
                hi *= 2.0
            last_rise = optimize.brentq(lambda x: beta * phi(x) - alpha, x_peak, hi, xtol=1e-14, rtol=1e-14)

    lo = last_rise if last_rise > 0 else 1e-300
    if raw(max(lo, 1e-300)) > 0:
        hi = max(2.0 * lo, 1.0)
        while raw(hi) > 0:
            hi *= 2.0
        root = optimize.brentq(raw, max(lo, 1e-12), hi, xtol=1e-15, rtol=1e-15)
        return root, 0.0
    # raw tail already below one at the last rising point
    return last_rise, raw(last_rise)


def survival(law: TailLaw, x):
    """``Pr(|a| > x)``; equals one for ``x <= x_min``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("survival is defined for x >= 0 only")
    out = np.ones_like(xa)
    above = xa > law.x_min
    if np.any(above):
        out[above] = np.minimum(1.0, np.exp(law.log_tail(xa[above])))
    return out if out.ndim else float(out)


def quantile(law: TailLaw, p):
    """Smallest ``x`` with ``survival(law, x) <= p`` for ``0 < p <= 1``."""
    pa = np.asarray(p, dtype=float)
    if np.any(~(pa > 0)) or np.any(pa > 1):
        raise ValueError("quantile needs 0 < p <= 1")
    if isinstance(law.variant, ConstantH):
        out = (law.variant.c / pa) ** (1.0 / law.alpha)
        out = np.maximum(out, law.x_min)
    else:
        out = _bisect_quantile(law, np.atleast_1d(pa)).reshape(pa.shape)
    return out if out.ndim else float(out)


def _bisect_quantile(law: TailLaw, p: np.ndarray) -> np.ndarray:
    # Bisection on log x; the tail is strictly decreasing above x_min.
    target = np.log(p)
    lo = np.full(p.shape, math.log(law.x_min))
    hi = lo + np.maximum(-target / law.alpha, 0.0) + 1.0
    while True:
        bad = law.log_tail(np.exp(hi)) > target
        if not np.any(bad):
            break
        hi = np.where(bad, hi + (hi - lo) + 1.0, hi)
    done = p >= 1.0
    width = hi - lo
    for _ in range(200):
        # converged elements are frozen so results do not depend on the batch
        active = (width > _BISECT_RTOL) & ~done
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        above = law.log_tail(np.exp(mid)) > target
        lo = np.where(active & above, mid, lo)
        hi = np.where(active & ~above, mid, hi)
        width = hi - lo
    out = np.exp(hi)
    out[done] = law.x_min
    return out


def sample_entry(law: TailLaw, rng) -> float:
    """One signed entry: ``u = 1 - rng.random()``, magnitude ``quantile(u)``,
    then a second uniform ``v`` gives the sign (``+1`` iff ``v < 0.5``)."""
    u = 1.0 - rng.random()
    v = rng.random()
    mag = quantile(law, u)
    return mag if v < 0.5 else -mag


def sample_entries(law: TailLaw, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized :func:`sample_entry`; consumes the stream identically."""
    draws = rng.random(2 * size).reshape(size, 2)
    mags = np.asarray(quantile(law, 1.0 - draws[:, 0]), dtype=float).reshape(size)
    return np.where(draws[:, 1] < 0.5, mags, -mags)


def solve_bn(law: TailLaw, n: int) -> float:
    """Normalization ``b_n`` with ``(n**2 / 2) * survival(b_n) = 1``."""
    if int(n) != n or n < 2:
        raise ValueError(f"solve_bn needs an integer n >= 2, got {n}")
    n = int(n)
    if isinstance(law.variant, ConstantH):
        return (law.variant.c * n * n / 2.0) ** (1.0 / law.alpha)
    return float(quantile(law, 2.0 / (n * n)))


def parse_law(text: str) -> TailLaw:
    """Parse ``"pareto:alpha=1.0"`` or ``"logpareto:alpha=1.0,beta=1.0"``."""
    name, _, params = text.strip().partition(":")
    kv = {}
    for item in filter(None, (s.strip() for s in params.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise ValueError(f"malformed law parameter {item!r} in {text!r}")
        kv[key.strip()] = float(value)
    if "alpha" not in kv:
        raise ValueError(f"law spec {text!r} lacks alpha")
    alpha = kv.pop("alpha")
    if name == "pareto":
        variant = ConstantH(kv.pop("c", 1.0))
    elif name == "logpareto":
        variant = LogPowerH(kv.pop("beta", 1.0))
    else:
        raise ValueError(f"unknown law family {name!r}")
    if kv:
        raise ValueError(f"unexpected parameters {sorted(kv)} in {text!r}")
    return TailLaw(alpha, variant)
