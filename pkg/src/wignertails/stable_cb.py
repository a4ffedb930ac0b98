"""Alpha-stable densities by Fourier inversion and the Cizeau-Bouchaud
integral equations for the bulk spectral density (exploratory).

Stable densities use the characteristic exponent
``-C |k|^a (1 + i beta sgn(k) tan(pi a / 2))`` inverted with ``e^{ikx}``,
which reduces to the real cosine integral::

    L(x) = (1/pi) int_0^inf exp(-C k^a) cos(k x - beta C k^a tan(pi a/2)) dk

The Cizeau-Bouchaud fixed point ``(C(x), beta(x))`` is searched by damped
iteration; nothing guarantees a solution exists, so non-convergence is a
reported outcome rather than an error.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import integrate, interpolate

__all__ = [
    "StableParams",
    "stable_density",
    "stable_cdf",
    "stable_tail_constant",
    "stable_normalization",
    "StableTable",
    "stable_table",
    "CBSolution",
    "CBDivergence",
    "cb_iterate",
    "cb_residual",
    "cb_density",
    "cb_normalization",
    "save_solution",
    "load_solution",
]

_KMAX_EXPONENT = 40.0
_EPSABS = 1e-10


@dataclass(frozen=True)
class StableParams:
    alpha: float
    C: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.C > 0:
            raise ValueError(f"scale C must be positive, got {self.C}")
        if not -1.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")
        if self.alpha == 1.0 and self.beta != 0.0:
            raise ValueError("alpha = 1 with beta != 0 is singular in this parameterization")

    @property
    def skew(self) -> float:
        if self.beta == 0.0:
            return 0.0
        return self.beta * math.tan(math.pi * self.alpha / 2.0)

    @property
    def k_max(self) -> float:
        return (_KMAX_EXPONENT / self.C) ** (1.0 / self.alpha)


def _density_point(p: StableParams, x: float) -> float:
    a, C, s = p.alpha, p.C, p.skew
    kmax = p.k_max

    def amp(k):
        return math.exp(-C * k ** a)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if x == 0.0:
            v, _ = integrate.quad(lambda k: amp(k) * math.cos(s * C * k ** a), 0.0, kmax,
                                  limit=500, epsabs=_EPSABS, epsrel=1e-12)
            return v / math.pi
        # cos(kx - phi) = cos(kx) cos(phi) + sin(kx) sin(phi)
        v1, _ = integrate.quad(lambda k: amp(k) * math.cos(s * C * k ** a), 0.0, kmax,
                               weight="cos", wvar=x, limit=500, epsabs=_EPSABS)
        v2 = 0.0
        if s != 0.0:
            v2, _ = integrate.quad(lambda k: amp(k) * math.sin(s * C * k ** a), 0.0, kmax,
                                   weight="sin", wvar=x, limit=500, epsabs=_EPSABS)
    return (v1 + v2) / math.pi


def stable_density(params: StableParams, x):
    """Density of the centered stable law at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    out = np.array([_density_point(params, float(v)) for v in xa.ravel()]).reshape(xa.shape)
    return out if out.ndim else float(out)


def _cdf_point(p: StableParams, x: float) -> float:
    # Gil-Pelaez: F(x) = 1/2 + (1/pi) int_0^inf exp(-C k^a) sin(kx - phi(k)) / k dk
    a, C, s = p.alpha, p.C, p.skew
    kmax = p.k_max

    def f(k):
        return math.exp(-C * k ** a) * math.sin(k * x - s * C * k ** a) / k

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if x == 0.0:
            v, _ = integrate.quad(f, 0.0, kmax, limit=1000, epsabs=_EPSABS)
            return 0.5 + v / math.pi
        k1 = min(kmax, 10.0 * math.pi / abs(x))
        v, _ = integrate.quad(f, 0.0, k1, limit=1000, epsabs=_EPSABS)
        if k1 < kmax:
            w1, _ = integrate.quad(lambda k: math.exp(-C * k ** a) * math.cos(s * C * k ** a) / k,
                                   k1, kmax, weight="sin", wvar=x, limit=1000, epsabs=_EPSABS)
            w2, _ = integrate.quad(lambda k: math.exp(-C * k ** a) * math.sin(s * C * k ** a) / k,
                                   k1, kmax, weight="cos", wvar=x, limit=1000, epsabs=_EPSABS)
            v += w1 - w2
    return 0.5 + v / math.pi


def stable_cdf(params: StableParams, x):
    xa = np.asarray(x, dtype=float)
    out = np.array([_cdf_point(params, float(v)) for v in xa.ravel()]).reshape(xa.shape)
    return out if out.ndim else float(out)


def stable_normalization(params: StableParams, span: float = 50.0) -> float:
    """Quadrature mass of the density on ``[-span, span]`` plus both tail
    masses from the Gil-Pelaez CDF."""
    breaks = np.concatenate([-np.geomspace(span, 0.5, 12), [0.0], np.geomspace(0.5, span, 12)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        mass = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            v, _ = integrate.quad(lambda x: _density_point(params, x), lo, hi, epsabs=1e-11, epsrel=1e-10, limit=200)
            mass += v
    return mass + (1.0 - _cdf_point(params, span)) + _cdf_point(params, -span)


def stable_tail_constant(a: float) -> float:
    """``C_a`` with ``Pr(X > x) ~ C_a (1 + beta)/2 * C x^-a`` as ``x -> inf``."""
    if a == 1.0:
        return 2.0 / math.pi
    return (1.0 - a) / (math.gamma(2.0 - a) * math.cos(math.pi * a / 2.0))


class StableTable:
    """Tabulated standardized density ``g(u; beta)`` (``C = 1``) for one
    exponent ``a < 1``, ``beta`` in ``[0, 1]``.

    ``L(z; C, beta) = C^(-1/a) g(C^(-1/a) z; beta)`` and
    ``g(u; -beta) = g(-u; beta)`` extend it to every scale and sign.  Nodes
    are uniform in ``asinh(u)`` up to ``|u| = u_max``; beyond that the leading
    power-law tail is used.
    """

    def __init__(self, a: float, n_u: int = 1201, u_max: float = 1e4, n_beta: int = 11):
        if not 0.0 < a < 1.0:
            raise ValueError("StableTable supports exponents in (0, 1)")
        self.a = a
        self.u_max = u_max
        self.v_nodes = np.linspace(-math.asinh(u_max), math.asinh(u_max), n_u)
        self.beta_nodes = np.linspace(0.0, 1.0, n_beta)
        u = np.sinh(self.v_nodes)
        table = np.empty((n_beta, n_u))
        for ib, b in enumerate(self.beta_nodes):
            table[ib] = stable_density(StableParams(a, 1.0, float(b)), u)
        self.values = table
        self._spline = interpolate.RectBivariateSpline(self.beta_nodes, self.v_nodes, table, kx=3, ky=3)
        self._tail = a * stable_tail_constant(a) / 2.0

    def standard(self, u, beta):
        u = np.asarray(u, dtype=float)
        beta = np.broadcast_to(np.asarray(beta, dtype=float), u.shape)
        flip = beta < 0
        uu = np.where(flip, -u, u)
        bb = np.abs(beta)
        out = np.empty(u.shape)
        inside = np.abs(uu) <= self.u_max
        out[inside] = self._spline.ev(bb[inside], np.arcsinh(uu[inside]))
        far = ~inside
        if np.any(far):
            side = np.where(uu[far] > 0, 1.0 + bb[far], 1.0 - bb[far])
            out[far] = self._tail * side * np.abs(uu[far]) ** (-1.0 - self.a)
        return np.clip(out, 0.0, None)

    def density(self, z, C, beta):
        C = np.asarray(C, dtype=float)
        scale = C ** (-1.0 / self.a)
        return scale * self.standard(np.asarray(z) * scale, beta)


@lru_cache(maxsize=8)
def stable_table(a: float) -> StableTable:
    return StableTable(a)


# --------------------------------------------------------------------------
# Cizeau-Bouchaud equations


class CBDivergence(RuntimeError):
    pass


@dataclass
class CBSolution:
    alpha: float
    grid: np.ndarray
    C_values: np.ndarray
    beta_values: np.ndarray
    residual: dict = field(default_factory=dict)
    iterations: int = 0
    status: str = "unsolved"
    history: list = field(default_factory=list)
    clamp_counts: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def span(self) -> float:
        return float(self.grid[-1])

    @property
    def density_values(self) -> np.ndarray:
        table = stable_table(self.alpha / 2.0)
        return table.density(self.grid, self.C_values, self.beta_values)


def _gauss_panels(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = np.polynomial.legendre.leggauss(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (xg[None, :] + 1.0)).ravel()
    weights = (half * wg[None, :]).ravel()
    return nodes, weights


class _CBQuadrature:
    """Fixed nodes in ``t = 1/y`` shared by both equations.

    In ``t`` the first equation reads ``C(x) = int |t|^(-a) L(x - t) dt``;
    the ``|t|^(-a)`` singularity is removed on ``|t| < 1/X`` by the
    substitution ``|t| = s^(1/(1-a))``.  The second equation, truncated at
    ``y <= X``, reads ``int_{1/t >= x, |t| >= 1/X} L(x - t) / t^2 dt``.
    Panel breaks include every ``1/x_i`` so the cut ``1/t >= x_i`` is exact.
    """

    def __init__(self, grid: np.ndarray, a: float, order: int = 8, t_max: float = 1e5,
                 step: float = 0.05):
        X = float(grid[-1])
        self.a, self.X, self.t_max = a, X, t_max
        nz = grid[grid != 0.0]
        inner = np.concatenate([
            np.abs(1.0 / nz),
            np.abs(nz),
            np.arange(1.0 / X, X + 5.0 + step, step),
        ])
        outer = np.geomspace(X + 5.0, t_max, 80)
        pos = np.unique(np.round(np.concatenate([[1.0 / X], inner, outer]), 12))
        pos = pos[pos >= 1.0 / X]
        t_pos, w_pos = _gauss_panels(pos, order)

        # singular panel (0, 1/X): t = d * s^(1/(1-a)), s in (0, 1)
        sg, swg = np.polynomial.legendre.leggauss(2 * order)
        s = 0.5 * (sg + 1.0)
        d = 1.0 / X
        t_sing = d * s ** (1.0 / (1.0 - a))
        # int_0^d t^-a g(t) dt = d^(1-a)/(1-a) int_0^1 g(t(s)) ds
        wc_sing = d ** (1.0 - a) / (1.0 - a) * 0.5 * swg

        t = np.concatenate([-t_pos[::-1], -t_sing[::-1], t_sing, t_pos])
        wc = np.concatenate([w_pos[::-1] * t_pos[::-1] ** -a, wc_sing[::-1], wc_sing, w_pos * t_pos ** -a])
        wb = np.concatenate([w_pos[::-1] / t_pos[::-1] ** 2, np.zeros_like(t_sing),
                             np.zeros_like(t_sing), w_pos / t_pos ** 2])
        self.t, self.wc, self.wb = t, wc, wb
        y = 1.0 / t
        # beta-equation mask: y in [x_i, X]
        self.beta_mask = (y[None, :] >= grid[:, None] - 1e-12) & (wb[None, :] > 0)
        self.grid = grid

    def rhs(self, C_vals: np.ndarray, beta_vals: np.ndarray, table: StableTable):
        grid, t = self.grid, self.t
        y = 1.0 / t
        # outside the grid C and beta are held at their edge values
        c_t = np.interp(y, grid, C_vals)
        b_t = np.interp(y, grid, beta_vals)
        z = grid[:, None] - t[None, :]
        L = table.density(z, c_t[None, :], b_t[None, :])
        new_C = L @ self.wc
        # tails |t| > t_max, y -> 0: L(x - t) ~ C0 a C_a (1 -+ beta0)/2 |t|^(-1-a)
        # (1 - beta0) + (1 + beta0) from the two sides
        c0 = float(np.interp(0.0, grid, C_vals))
        new_C += c0 * table._tail * 2.0 * self.t_max ** (-2.0 * self.a) / (2.0 * self.a)
        new_beta = (L * self.beta_mask) @ self.wb
        return new_C, new_beta


def _cb_setup(alpha: float, grid) -> tuple[np.ndarray, StableTable, _CBQuadrature]:
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing 1-d array")
    if not np.allclose(grid, -grid[::-1], atol=1e-12):
        raise ValueError("grid must be symmetric about 0")
    table = stable_table(alpha / 2.0)
    return grid, table, _CBQuadrature(grid, alpha / 2.0)


def cb_iterate(alpha: float, grid, max_iters: int = 200, tol: float = 1e-3, damping: float = 0.5,
               C0: float = 1.0, beta0: float = 0.0, divergence_window: int = 10) -> CBSolution:
    """Damped fixed-point iteration for ``(C(x), beta(x))`` on ``grid``.

    ``C_{t+1} = (1 - damping) C_t + damping F_C(C_t, beta_t)``, likewise for
    ``beta``; ``C`` is clamped at ``1e-12`` and ``beta`` to ``[0, 1]`` with
    clamps counted.  Stops when the sup-norm change is at most ``tol``, when
    the change has grown for ``divergence_window`` consecutive iterations
    (status ``"diverged"``), or after ``max_iters`` (status ``"max_iters"``).
    """
    grid, table, quad = _cb_setup(alpha, grid)
    C = np.full(grid.size, float(C0))
    beta = np.full(grid.size, float(beta0))
    history: list[float] = []
    clamps = {"C": 0, "beta": 0}
    status = "max_iters"
    growth = 0
    it = 0
    for it in range(1, max_iters + 1):
        fC, fb = quad.rhs(C, beta, table)
        newC = (1.0 - damping) * C + damping * fC
        newb = (1.0 - damping) * beta + damping * fb
        low = newC < 1e-12
        clamps["C"] += int(low.sum())
        newC[low] = 1e-12
        outside = (newb < 0.0) | (newb > 1.0)
        clamps["beta"] += int(outside.sum())
        newb = np.clip(newb, 0.0, 1.0)
        change = float(max(np.max(np.abs(newC - C)), np.max(np.abs(newb - beta))))
        if not math.isfinite(change):
            status = "diverged"
            history.append(change)
            break
        C, beta = newC, newb
        growth = growth + 1 if history and change > history[-1] else 0
        history.append(change)
        if change <= tol:
            status = "converged"
            break
        if growth >= divergence_window:
            status = "diverged"
            break
    sol = CBSolution(alpha=alpha, grid=grid, C_values=C, beta_values=beta, iterations=it,
                     status=status, history=history, clamp_counts=clamps)
    res_C, res_b = cb_residual(sol)
    sol.residual = {"C": res_C, "beta": res_b, "beta_clamped": _clamped_beta_residual(sol, quad, table)}
    return sol


def _clamped_beta_residual(sol: CBSolution, quad: _CBQuadrature, table: StableTable) -> float:
    _, fb = quad.rhs(sol.C_values, sol.beta_values, table)
    return float(np.max(np.abs(np.clip(fb, 0.0, 1.0) - sol.beta_values)))


def cb_residual(solution: CBSolution) -> tuple[float, float]:
    """Sup-norm gaps between both sides of each equation on the grid."""
    grid, table, quad = _cb_setup(solution.alpha, solution.grid)
    fC, fb = quad.rhs(solution.C_values, solution.beta_values, table)
    return float(np.max(np.abs(fC - solution.C_values))), float(np.max(np.abs(fb - solution.beta_values)))


def cb_density(solution: CBSolution, x) -> tuple[np.ndarray, np.ndarray]:
    """``f(x) = L_{alpha/2}^{C(x), beta(x)}(x)`` with linear interpolation of
    ``C`` and ``beta``; outside the grid a ``|x|^(-1-alpha)`` tail matched at
    the nearest edge is returned and flagged."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    grid = solution.grid
    X = solution.span
    table = stable_table(solution.alpha / 2.0)
    inside = np.abs(xa) <= X
    out = np.empty(xa.shape)
    c = np.interp(xa[inside], grid, solution.C_values)
    b = np.interp(xa[inside], grid, solution.beta_values)
    out[inside] = table.density(xa[inside], c, b)
    if np.any(~inside):
        f_edge = solution.density_values[[0, -1]]
        amp = np.where(xa[~inside] > 0, f_edge[1], f_edge[0]) * X ** (1.0 + solution.alpha)
        out[~inside] = amp * np.abs(xa[~inside]) ** (-1.0 - solution.alpha)
    return out, ~inside


def cb_normalization(solution: CBSolution) -> float:
    """Trapezoid mass on the grid plus power-law tails matched at ``+-X``."""
    f = solution.density_values
    X, a = solution.span, solution.alpha
    return float(np.trapezoid(f, solution.grid) + (f[0] + f[-1]) * X / a)


def save_solution(solution: CBSolution, csv_path) -> Path:
    """CSV with ``x, C, beta, f``; residuals and status go to a JSON sidecar."""
    csv_path = Path(csv_path)
    f = solution.density_values
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "C", "beta", "f"])
        for row in zip(solution.grid, solution.C_values, solution.beta_values, f):
            w.writerow([repr(float(v)) for v in row])
    sidecar = csv_path.with_suffix(".json")
    sidecar.write_text(json.dumps({
        "alpha": solution.alpha,
        "status": solution.status,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "history": solution.history,
        "clamp_counts": solution.clamp_counts,
        "normalization": cb_normalization(solution),
    }, indent=2))
    return csv_path


def load_solution(csv_path) -> CBSolution:
    csv_path = Path(csv_path)
    with csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    return CBSolution(
        alpha=meta["alpha"],
        grid=np.array([float(r["x"]) for r in rows]),
        C_values=np.array([float(r["C"]) for r in rows]),
        beta_values=np.array([float(r["beta"]) for r in rows]),
        residual=meta["residual"],
        iterations=meta["iterations"],
        status=meta["status"],
        history=meta["history"],
        clamp_counts=meta["clamp_counts"],
    )
