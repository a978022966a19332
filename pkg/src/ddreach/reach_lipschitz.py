"""Data-driven reachability for Lipschitz nonlinear systems.

A global affine model is fitted to the data around a linearization point.
The worst residual over the data bounds the model error at the data points,
and ``L* delta`` bounds how far the dynamics can move between a data point
and any other point of the region covered by the data.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ddreach.data import DataMatrices, covering_radius, lipschitz_estimate, right_inverse
from ddreach.errors import ConfigError, DimensionError
from ddreach.matrix_sets import MatrixZonotope
from ddreach.reach_lti import DEFAULT_REDUCE_ORDER, ReachSequence, _input_list
from ddreach.sets import Interval, Zonotope


@dataclass(frozen=True)
class LipschitzConfig:
    """Constants of the remainder bound.

    Attributes:
        L_star: Lipschitz constant of the dynamics over the analysed region.
        delta: covering radius of the data over that region.
        estimate_from_data: replace ``L_star``/``delta`` by pairwise data
            estimates (heuristic, no guarantee).
        relinearize_each_step: move the linearization point to the centers
            of the current state and input sets at every step.
        shift_correction: also bound the affine model's change between a
            data point and the point it covers (``|row| * delta`` per state).
        per_step: optional ``(L_star, delta)`` pairs overriding the constants
            at individual steps.
    """

    L_star: float = 0.0
    delta: float = 0.0
    estimate_from_data: bool = False
    relinearize_each_step: bool = False
    shift_correction: bool = False
    per_step: tuple = field(default=())

    def __post_init__(self):
        if not (np.isfinite(self.L_star) and self.L_star >= 0):
            raise ConfigError("L_star must be a finite non-negative number")
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise ConfigError("delta must be a finite non-negative number")
        steps = tuple((float(a), float(b)) for a, b in self.per_step)
        if any(a < 0 or b < 0 for a, b in steps):
            raise ConfigError("per_step constants must be non-negative")
        object.__setattr__(self, "per_step", steps)

    def constants(self, k: int) -> tuple[float, float]:
        if k < len(self.per_step):
            return self.per_step[k]
        return float(self.L_star), float(self.delta)

    def resolved(self, D: DataMatrices) -> "LipschitzConfig":
        """Copy with data estimates filled in when ``estimate_from_data`` is set."""
        if not self.estimate_from_data:
            return self
        return LipschitzConfig(lipschitz_estimate(D), covering_radius(D), True,
                               self.relinearize_each_step, self.shift_correction, self.per_step)


def _regressor(D: DataMatrices, xstar, ustar) -> np.ndarray:
    xstar = np.asarray(xstar, dtype=float).reshape(-1, 1)
    ustar = np.asarray(ustar, dtype=float).reshape(-1, 1)
    if xstar.shape[0] != D.n or ustar.shape[0] != D.m:
        raise DimensionError(f"linearization point must be in R^{D.n} x R^{D.m}")
    return np.vstack([np.ones((1, D.T)), D.X_minus - xstar, D.U_minus - ustar])


def _noise_center(Mw, D):
    if Mw is None:
        return np.zeros_like(D.X_plus)
    C = Mw.center if isinstance(Mw, MatrixZonotope) else np.asarray(Mw, dtype=float)
    if C.shape != D.X_plus.shape:
        raise DimensionError(f"noise matrix center is {C.shape}, data is {D.X_plus.shape}")
    return C


def fit_linear_model(D: DataMatrices, Mw, xstar, ustar) -> np.ndarray:
    """Least-squares ``[c, A, B]`` with ``x+ ~ c + A (x - x*) + B (u - u*)``."""
    if D.T == 0:
        raise ValueError("no data")
    return (D.X_plus - _noise_center(Mw, D)) @ right_inverse(_regressor(D, xstar, ustar))


def data_residuals(D: DataMatrices, M: np.ndarray, xstar, ustar) -> np.ndarray:
    return D.X_plus - M @ _regressor(D, xstar, ustar)


def compute_ZL(D: DataMatrices, M: np.ndarray, Zw: Zonotope, xstar, ustar) -> Zonotope:
    """Residual box of the fit minus the process noise (``box + (-1) Zw``)."""
    r = data_residuals(D, M, xstar, ustar)
    return Interval(r.min(axis=1), r.max(axis=1)).to_zonotope() - Zw


def compute_Zeps(cfg: LipschitzConfig, n: int, step: int = 0) -> Zonotope:
    L, d = cfg.constants(step)
    return Interval(-np.full(n, L * d), np.full(n, L * d)).to_zonotope()


def shift_bound(M: np.ndarray, delta: float) -> Zonotope:
    """Box of radius ``|row_i| * delta`` bounding ``M_lin (z_i - z)`` for ``|z_i - z| <= delta``."""
    r = np.linalg.norm(M[:, 1:], axis=1) * delta
    return Interval(-r, r).to_zonotope()


def alg6_reach(D: DataMatrices, Mw, Zw: Zonotope, cfg: LipschitzConfig, X0: Zonotope, U, N: int,
               reduce_order=DEFAULT_REDUCE_ORDER) -> ReachSequence:
    """Reachable sets of an unknown Lipschitz system from data."""
    if D.T == 0:
        raise ValueError("no data")
    cfg = cfg.resolved(D)
    U = _input_list(U, N)
    n = D.n
    sets, times = [X0], []
    R = X0
    xstar, ustar = X0.center, U[0].center
    M = fit_linear_model(D, Mw, xstar, ustar)
    ZL = compute_ZL(D, M, Zw, xstar, ustar)
    one = Zonotope(np.ones(1))
    for k in range(N):
        t0 = time.perf_counter()
        if cfg.relinearize_each_step and k > 0:
            xstar, ustar = R.center, U[k].center
            M = fit_linear_model(D, Mw, xstar, ustar)
            ZL = compute_ZL(D, M, Zw, xstar, ustar)
        Z = one.cartesian(R - xstar).cartesian(U[k] - ustar)
        R = Z.linear_map(M) + Zw + ZL + compute_Zeps(cfg, n, k)
        if cfg.shift_correction:
            R = R + shift_bound(M, cfg.constants(k)[1])
        R = R.compact()
        if reduce_order:
            R = R.reduce(reduce_order)
        times.append(time.perf_counter() - t0)
        sets.append(R)
    hull = _coverage_hull(sets[:-1], U[:N])
    meta = {
        "L_star": cfg.L_star,
        "delta": cfg.delta,
        "constants_estimated": cfg.estimate_from_data,
        "shift_correction": cfg.shift_correction,
        "coverage_hull": hull.to_dict(),
    }
    return ReachSequence(sets, "alg6", times, heuristic=cfg.estimate_from_data, meta=meta)


def _coverage_hull(R_list, U_list) -> Interval:
    """Box around ``union_k R_k x U_k``; the region the constants must be valid on."""
    hulls = [R.cartesian(Uk).interval_hull() for R, Uk in zip(R_list, U_list)]
    return Interval(np.min([h.lower for h in hulls], axis=0), np.max([h.upper for h in hulls], axis=0))
