"""Model-based references used to check the data-driven sets.

``model_reach_lti`` is the exact zonotope recursion with the true matrices,
``monte_carlo_check`` pushes sampled true trajectories through a known model
and tests membership step by step, and ``brute_force_cmz_product`` enumerates
``{X z}`` on a factor grid for small product instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ddreach.data import CH_INITIAL, CH_INPUT, CH_PROCESS, SystemModel, substream
from ddreach.matrix_sets import as_cmz
from ddreach.reach_lti import ReachSequence, _input_list
from ddreach.sets import ConstrainedZonotope, Zonotope


@dataclass
class ContainmentReport:
    """Per-step Monte Carlo containment counts."""

    samples: list
    contained: list
    max_violation: list
    directions: int = 0
    method: str = ""
    support_excess: list = field(default_factory=list)

    def __post_init__(self):
        if any(c > s for c, s in zip(self.contained, self.samples)):
            raise ValueError("contained count exceeds sample count")

    @property
    def all_contained(self) -> bool:
        return all(c == s for c, s in zip(self.contained, self.samples))

    @property
    def fraction(self) -> float:
        total = sum(self.samples)
        return sum(self.contained) / total if total else 1.0

    def step_fractions(self) -> list[float]:
        return [c / s if s else 1.0 for c, s in zip(self.contained, self.samples)]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "samples": list(self.samples),
            "contained": list(self.contained),
            "max_violation": [float(v) for v in self.max_violation],
            "directions": self.directions,
            "support_excess": [float(v) for v in self.support_excess],
            "all_contained": self.all_contained,
        }


def model_reach_lti(A, B, X0: Zonotope, U, Zw: Zonotope, N: int) -> ReachSequence:
    """Exact reachable sets ``R_{k+1} = [A B](R_k x U_k) + Zw`` of the true system."""
    AB = np.hstack([np.atleast_2d(A), np.asarray(B, dtype=float).reshape(np.shape(A)[0], -1)])
    U = _input_list(U, N)
    sets = [X0]
    for k in range(N):
        sets.append((sets[-1].cartesian(U[k])).linear_map(AB) + Zw)
    return ReachSequence(sets, "model")


def fixed_directions(n: int, extra: int = 16, seed: int = 12345) -> np.ndarray:
    """Axis directions plus a seeded batch of random unit directions."""
    rng = np.random.default_rng(seed)
    R = rng.normal(size=(extra, n))
    R /= np.linalg.norm(R, axis=1, keepdims=True)
    return np.vstack([np.eye(n), -np.eye(n), R])


def sample_endpoints(model: SystemModel, X0: Zonotope, U, Zw: Zonotope, N: int, samples: int,
                     seed: int) -> list[np.ndarray]:
    """States ``x_0 ... x_N`` of ``samples`` true trajectories (one array per step)."""
    U = _input_list(U, N)
    x = X0.sample_points(samples, substream(seed, 0, CH_INITIAL))
    out = [x]
    for k in range(N):
        u = U[k].sample_points(samples, substream(seed, k, CH_INPUT))
        w = Zw.sample_points(samples, substream(seed, k, CH_PROCESS))
        x = model.step(x, u) + w
        out.append(x)
    return out


def monte_carlo_check(model: SystemModel, X0: Zonotope, U, Zw: Zonotope, sequence: ReachSequence,
                      samples: int = 1000, seed: int = 0, tol: float = 1e-7) -> ContainmentReport:
    """Fraction of sampled true states inside each ``sequence[k]``.

    The violation distance of an outside point is the largest ``d.x - h(d)``
    over a fixed direction set, ``h`` being the support function of the set.
    """
    N = sequence.horizon
    pts = sample_endpoints(model, X0, U, Zw, N, samples, seed)
    dirs = fixed_directions(X0.dim)
    counts, contained, violation = [], [], []
    for k in range(N + 1):
        inside = sequence[k].contains_points(pts[k], tol)
        counts.append(int(samples))
        contained.append(int(inside.sum()))
        if inside.all():
            violation.append(0.0)
        else:
            h = sequence[k].support(dirs)
            excess = pts[k][~inside] @ dirs.T - h
            violation.append(float(max(0.0, excess.max())))
    return ContainmentReport(counts, contained, violation, dirs.shape[0], sequence.method)


def support_excess(inner, outer, directions: np.ndarray) -> float:
    """``max_d h_inner(d) - h_outer(d)``; non-positive when ``inner`` fits in ``outer`` along ``d``."""
    return float(np.max(inner.support(directions) - outer.support(directions)))


def random_directions(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    D = rng.normal(size=(count, n))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def nesting_report(inner: ReachSequence, outer: ReachSequence, count: int = 100, seed: int = 0) -> list[float]:
    """Per-step support excess of ``inner`` over ``outer`` along ``count`` random directions."""
    out = []
    for k in range(min(len(inner), len(outer))):
        D = random_directions(inner[k].dim, count, seed + k)
        out.append(support_excess(inner[k], outer[k], D))
    return out


# brute-force products --------------------------------------------------------

def _grid(dim: int, points: int) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, points)
    if dim == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product(axis, repeat=dim)))


def _feasible_grid(A, b, dim, points, tol=1e-6):
    G = _grid(dim, points)
    if A is None or A.shape[0] == 0:
        return G
    keep = np.all(np.abs(G @ A.T - b) <= tol, axis=1)
    return G[keep]


def _extreme_rows(P: np.ndarray) -> np.ndarray:
    """Rows of ``P`` that are vertices of its convex hull (all rows when tiny or degenerate)."""
    if P.shape[0] <= 2 * max(P.shape[1], 1) + 2 or P.shape[1] == 0:
        return P
    c = P.mean(axis=0)
    _, s, Vt = np.linalg.svd(P - c, full_matrices=False)
    r = int(np.sum(s > 1e-9 * max(s[0], 1e-300)))
    if r == 0:
        return P[:1]
    Q = (P - c) @ Vt[:r].T
    if r == 1:
        return P[[int(np.argmin(Q[:, 0])), int(np.argmax(Q[:, 0]))]]
    try:
        return P[ConvexHull(Q).vertices]
    except QhullError:
        return P


def brute_force_cmz_product(N, Z, grid: int = 21, full: bool = False) -> np.ndarray:
    """Points ``X(beta) z(theta)`` over a factor grid with ``grid`` points per factor.

    Matrix factors ``beta`` and set factors ``theta`` are taken from a uniform
    grid on ``[-1, 1]`` and kept when their equality constraints hold to 1e-6.
    Since the product is affine in each factor group separately, the convex
    hull of the full cloud equals the hull of the products of the two groups'
    extreme grid points; that reduced cloud is returned unless ``full`` is set.
    """
    N = as_cmz(N)
    if N.n_generators > 3 or Z.n_generators > 3:
        raise ValueError("brute force is limited to at most 3 factors per operand")
    A_vec, b_vec = N.vectorized_constraints() if N.B.size else (None, None)
    betas = _feasible_grid(A_vec, b_vec, N.n_generators, grid)
    Az = Z.A if isinstance(Z, ConstrainedZonotope) else None
    bz = Z.b if isinstance(Z, ConstrainedZonotope) else None
    thetas = _feasible_grid(Az, bz, Z.n_generators, grid)
    if not full:
        betas, thetas = _extreme_rows(betas), _extreme_rows(thetas)
    Xs = N.center + np.tensordot(betas, N.generators, axes=1)  # (nb, n, p)
    zs = Z.center + thetas @ Z.generators.T  # (nz, p)
    return np.einsum("bij,zj->bzi", Xs, zs).reshape(-1, N.shape[0])
