"""Reachability analysis of unknown systems from noisy data.

Set representations (zonotopes, constrained zonotopes and their matrix
versions), a dense bounded-variable LP solver, and data-driven reachability
for linear, polynomial and Lipschitz systems.
"""

from ddreach.errors import (
    ConfigError,
    DimensionError,
    InfeasibleError,
    RankDeficiencyError,
    UnsupportedRegimeError,
)
from ddreach.matrix_sets import ConstrainedMatrixZonotope, MatrixZonotope
from ddreach.sets import ConstrainedZonotope, Interval, Zonotope

__all__ = [
    "ConfigError",
    "ConstrainedMatrixZonotope",
    "ConstrainedZonotope",
    "DimensionError",
    "InfeasibleError",
    "Interval",
    "MatrixZonotope",
    "RankDeficiencyError",
    "UnsupportedRegimeError",
    "Zonotope",
]
__version__ = "0.1.0"
