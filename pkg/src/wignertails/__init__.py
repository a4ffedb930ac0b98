"""Monte Carlo lab for heavy-tailed Wigner matrices.

Extreme eigenvalues and entry order statistics, their Frechet/Poisson
limits, alpha-stable densities and a bulk-density fixed-point solver.
"""
__version__ = "0.1.0"

from .tail_laws import ConstantH, LogPowerH, TailLaw, parse_law, quantile, sample_entry, solve_bn, survival
from .ensemble import WignerSample, entry_order_stats, mix_seed, row_diagnostics, sample_matrix, top_entry_stats
from .spectral import principal_submatrix_top, top_eigenvalues
from .limit_laws import Interval, frechet_cdf, order_stat_cdf, poisson_mean, semicircle_density
from .stat_tests import ks_statistic, poisson_count_test

__all__ = [
    "ConstantH",
    "Interval",
    "LogPowerH",
    "TailLaw",
    "WignerSample",
    "entry_order_stats",
    "frechet_cdf",
    "ks_statistic",
    "mix_seed",
    "order_stat_cdf",
    "parse_law",
    "poisson_count_test",
    "poisson_mean",
    "principal_submatrix_top",
    "quantile",
    "row_diagnostics",
    "sample_entry",
    "sample_matrix",
    "semicircle_density",
    "solve_bn",
    "survival",
    "top_eigenvalues",
    "top_entry_stats",
]
