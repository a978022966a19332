"""Benchmark systems and their experiment sets.

``five_state_lti`` and ``quadratic_two_state`` are the linear and polynomial
case studies. ``pendulum_like`` is a smooth two-state system with a global
Lipschitz bound, used for the Lipschitz pipeline together with ``grid_data``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ddreach.data import CH_PROCESS, DataMatrices, SystemModel, substream
from ddreach.reach_lti import SideInfo
from ddreach.reach_poly import MonomialBasis
from ddreach.sets import Interval, Zonotope

A_LTI = np.array([
    [0.9323, -0.1890, 0.0, 0.0, 0.0],
    [0.1890, 0.9323, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.8596, 0.0430, 0.0],
    [0.0, 0.0, -0.0430, 0.8596, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.9048],
])
B_LTI = np.array([[0.0436], [0.0533], [0.0475], [0.0453], [0.0476]])


@dataclass(frozen=True)
class Experiment:
    """A system with the sets of one study."""

    model: SystemModel
    X0: Zonotope
    U: Zonotope
    Zw: Zonotope
    Zv: Zonotope | None = None
    K: int = 1
    T_i: int = 1
    N: int = 5


def five_state_lti() -> SystemModel:
    return SystemModel.lti(A_LTI, B_LTI, name="five_state_lti")


def five_state_experiment(measurement: bool = False) -> Experiment:
    Zv = Zonotope(np.zeros(5), 0.002 * np.ones((5, 1))) if measurement else None
    return Experiment(
        five_state_lti(),
        X0=Zonotope(np.ones(5), 0.1 * np.eye(5)),
        U=Zonotope([10.0], [[0.25]]),
        Zw=Zonotope(np.zeros(5), 0.005 * np.ones((5, 1))),
        Zv=Zv, K=3, T_i=10, N=5,
    )


def five_state_side_info() -> SideInfo:
    """States 1-2 and 3-4 are coupled pairs, state 5 is decoupled; every state sees the input."""
    coupled = np.zeros((5, 5), dtype=bool)
    for block in ((0, 1), (2, 3), (4,)):
        coupled[np.ix_(block, block)] = True
    R = np.where(coupled, 1.0, 0.001)
    R = np.hstack([R, np.ones((5, 1))])
    return SideInfo(np.eye(5), np.zeros((5, 6)), R)


def quadratic_basis() -> MonomialBasis:
    return MonomialBasis.from_degree(4, 2)


def quadratic_two_state() -> SystemModel:
    """``x1+ = 0.7 x1 + u1 + 0.32 x1^2``, ``x2+ = 0.09 x1 + 0.32 u2 x1 + 0.4 x2^2``."""
    basis = quadratic_basis()
    C = np.zeros((2, len(basis)))
    terms = {
        0: {(1, 0, 0, 0): 0.7, (0, 0, 1, 0): 1.0, (2, 0, 0, 0): 0.32},
        1: {(1, 0, 0, 0): 0.09, (1, 0, 0, 1): 0.32, (0, 2, 0, 0): 0.4},
    }
    for row, coeffs in terms.items():
        for alpha, c in coeffs.items():
            C[row, basis.index(alpha)] = c
    return SystemModel("polynomial", 2, 2, coefficients=C, basis=basis, name="quadratic_two_state")


def quadratic_experiment() -> Experiment:
    return Experiment(
        quadratic_two_state(),
        X0=Zonotope([1.0, 2.0], np.diag([0.05, 0.3])),
        U=Zonotope([0.2, 0.3], np.diag([0.01, 0.02])),
        Zw=Zonotope(np.zeros(2), [[0.7e-4], [0.7e-4]]),
        K=20, T_i=7, N=5,
    )


def quadratic_side_info(model: SystemModel | None = None) -> SideInfo:
    """Structural prior: coefficients of monomials absent from a row are within 0.001 of zero,
    the others are bounded by 1 in magnitude."""
    model = model or quadratic_two_state()
    C = model.coefficients
    R = np.where(C != 0.0, 1.0, 0.001)
    return SideInfo(np.eye(C.shape[0]), np.zeros_like(C), R)


# Lipschitz stand-in ------------------------------------------------------------

def _pendulum_fn(X, U):
    x1, x2, u = X[:, 0], X[:, 1], U[:, 0]
    return np.column_stack([
        0.8 * x1 + 0.2 * np.sin(x2) + 0.5 * u,
        0.1 * np.cos(x1) + 0.7 * x2 + 0.3 * u,
    ])


# Jacobian [[0.8, 0.2 cos x2, 0.5], [-0.1 sin x1, 0.7, 0.3]]: squared entries are
# bounded by 0.64 + 0.04 + 0.25 + 0.01 + 0.49 + 0.09 everywhere, so the Frobenius
# norm (an upper bound on the spectral norm) gives a global Lipschitz constant.
PENDULUM_LIPSCHITZ = float(np.sqrt(1.52))


def pendulum_like() -> SystemModel:
    return SystemModel("lipschitz", 2, 1, fn=_pendulum_fn, name="pendulum_like")


def pendulum_experiment() -> Experiment:
    return Experiment(
        pendulum_like(),
        X0=Zonotope([1.0, 1.0], 0.1 * np.eye(2)),
        U=Zonotope([0.5], [[0.1]]),
        Zw=Zonotope(np.zeros(2), 0.005 * np.eye(2)),
        N=5,
    )


PENDULUM_REGION = Interval([0.0, 0.0, 0.4], [3.0, 1.6, 0.6])


def grid_points(region: Interval, spacing) -> np.ndarray:
    """Regular grid over ``region`` (rows), endpoint-inclusive; spacing must divide each side."""
    spacing = np.broadcast_to(np.asarray(spacing, dtype=float), region.lower.shape)
    axes = []
    for lo, hi, h in zip(region.lower, region.upper, spacing):
        count = int(round((hi - lo) / h))
        if not np.isclose(lo + count * h, hi, rtol=0, atol=1e-9 * max(1.0, abs(hi))):
            raise ValueError(f"spacing {h} does not divide [{lo}, {hi}]")
        axes.append(lo + h * np.arange(count + 1))
    return np.array(list(itertools.product(*axes)))


def grid_covering_radius(spacing, dim: int) -> float:
    """Any point of the gridded box is within this distance of a grid point."""
    spacing = np.broadcast_to(np.asarray(spacing, dtype=float), (dim,))
    return float(np.sqrt(np.sum((spacing / 2.0) ** 2)))


def grid_data(model: SystemModel, region: Interval, spacing, Zw: Zonotope, seed: int = 0) -> DataMatrices:
    """One-step data from every grid point of the ``(x, u)`` box, with sampled process noise."""
    Z = grid_points(region, spacing)
    X, U = Z[:, :model.n], Z[:, model.n:]
    F = model.step(X, U)
    W = np.array([Zw.sample_point(substream(seed, i, 0, CH_PROCESS)) for i in range(Z.shape[0])])
    return DataMatrices((F + W).T, X.T.copy(), U.T.copy(), W_minus=W.T, lengths=(1,) * Z.shape[0])
