"""Data-driven reachability for polynomial systems.

The unknown dynamics are written as ``f(z) = C g(z)`` with ``g`` a vector of
monomials in ``z = [x; u]``. The coefficient set is identified exactly like
the linear case with the monomial data matrix in place of ``[X_minus;
U_minus]``; propagation boxes the current set, evaluates every monomial with
interval arithmetic and multiplies the resulting box by the coefficient set.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from ddreach.data import DataMatrices, kernel_basis, right_inverse
from ddreach.errors import DimensionError
from ddreach.matrix_sets import (
    ConstrainedMatrixZonotope,
    MatrixZonotope,
    cmz_affine,
    cmz_times_zonotope,
    mz_affine,
    mz_times_zonotope,
)
from ddreach.reach_lti import (
    DEFAULT_REDUCE_ORDER,
    ReachSequence,
    SideInfo,
    _input_list,
    build_side_info_cmz,
    constrain_noise,
)
from ddreach.sets import Interval, Zonotope


@dataclass(frozen=True)
class MonomialBasis:
    """Exponent vectors ``alpha``; monomial ``z^alpha = prod_i z_i^alpha_i``."""

    exponents: tuple

    def __post_init__(self):
        E = tuple(tuple(int(a) for a in row) for row in self.exponents)
        if not E:
            raise ValueError("basis needs at least one monomial")
        if len({len(r) for r in E}) != 1:
            raise DimensionError("exponent vectors have different lengths")
        if any(a < 0 for r in E for a in r):
            raise ValueError("exponents must be non-negative")
        if len(set(E)) != len(E):
            raise ValueError("exponent vectors must be distinct")
        object.__setattr__(self, "exponents", E)

    @classmethod
    def from_degree(cls, n_vars: int, degree: int) -> "MonomialBasis":
        """All monomials of total degree at most ``degree``, graded then lexicographic."""
        rows = []
        for d in range(degree + 1):
            level = [e for e in itertools.product(range(d + 1), repeat=n_vars) if sum(e) == d]
            rows.extend(sorted(level, reverse=True))
        return cls(tuple(rows))

    @property
    def n_vars(self) -> int:
        return len(self.exponents[0])

    @property
    def array(self) -> np.ndarray:
        return np.array(self.exponents, dtype=int)

    def __len__(self):
        return len(self.exponents)

    def index(self, alpha) -> int:
        return self.exponents.index(tuple(int(a) for a in alpha))

    def evaluate(self, Z) -> np.ndarray:
        """Monomials of each row of ``Z``; returns ``(rows, len(basis))`` (or a vector for one point)."""
        Z = np.asarray(Z, dtype=float)
        single = Z.ndim == 1
        Z2 = np.atleast_2d(Z)
        if Z2.shape[1] != self.n_vars:
            raise DimensionError(f"basis is over {self.n_vars} variables, got {Z2.shape[1]}")
        E = self.array
        out = np.ones((Z2.shape[0], len(self)))
        for v in range(self.n_vars):
            out *= Z2[:, [v]] ** E[:, v]  # 0**0 == 1 in numpy
        return out[0] if single else out

    def to_list(self) -> list:
        return [list(e) for e in self.exponents]


def eval_monomials(basis: MonomialBasis, z) -> np.ndarray:
    return basis.evaluate(np.asarray(z, dtype=float).reshape(-1))


def assemble_Ghat(basis: MonomialBasis, D: DataMatrices) -> np.ndarray:
    """``[g(z_0) ... g(z_{T-1})]`` for the data points ``z_j = [x_j; u_j]``."""
    return basis.evaluate(D.Z_minus.T).T


def _interval_power(lo, hi, e):
    if e == 0:
        return 1.0, 1.0
    a, b = lo ** e, hi ** e
    if e % 2 == 1 or lo >= 0.0:
        return min(a, b), max(a, b)
    if hi <= 0.0:
        return b, a
    return 0.0, max(a, b)


def _interval_mul(x, y):
    c = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return min(c), max(c)


def interval_monomials(basis: MonomialBasis, Rint: Interval, Uint: Interval) -> Interval:
    """Box enclosing every monomial over ``Rint x Uint``.

    Powers of one variable are exact; products of different variables use the
    four-corner rule.
    """
    lo = np.concatenate([Rint.lower, Uint.lower])
    hi = np.concatenate([Rint.upper, Uint.upper])
    if lo.size != basis.n_vars:
        raise DimensionError(f"basis is over {basis.n_vars} variables, boxes have {lo.size}")
    lower, upper = np.empty(len(basis)), np.empty(len(basis))
    for k, alpha in enumerate(basis.exponents):
        acc = (1.0, 1.0)
        for v, e in enumerate(alpha):
            if e:
                acc = _interval_mul(acc, _interval_power(lo[v], hi[v], e))
        lower[k], upper[k] = acc
    return Interval(lower, upper)


def compute_Msigma_p(D: DataMatrices, Mw: MatrixZonotope, basis: MonomialBasis) -> MatrixZonotope:
    """Coefficient matrices consistent with the data: ``(X_plus - Mw) Ghat^+``."""
    H = right_inverse(assemble_Ghat(basis, D))
    return mz_affine(D.X_plus, Mw, H)


def compute_Nsigma_p(D: DataMatrices, Mw: MatrixZonotope, basis: MonomialBasis) -> ConstrainedMatrixZonotope:
    """Constrained coefficient set using the kernel of the monomial data matrix."""
    G = assemble_Ghat(basis, D)
    H = right_inverse(G)
    Nw = constrain_noise(D.X_plus, Mw, kernel_basis(G))
    return cmz_affine(D.X_plus, Nw, H)


def _monomial_zonotope(basis, R, Uk) -> Zonotope:
    return interval_monomials(basis, R.interval_hull(), Uk.interval_hull()).to_zonotope()


def _propagate_poly(model, basis, X0, U, Zw, N, method, reduce_order=None) -> ReachSequence:
    U = _input_list(U, N)
    sets, times = [X0], []
    R = X0
    for k in range(N):
        t0 = time.perf_counter()
        Ig = _monomial_zonotope(basis, R, U[k])
        if isinstance(model, ConstrainedMatrixZonotope):
            R = cmz_times_zonotope(model, Ig)
        else:
            R = mz_times_zonotope(model, Ig)
        R = (R + Zw).compact()
        if isinstance(R, Zonotope) and reduce_order:
            R = R.reduce(reduce_order)
        times.append(time.perf_counter() - t0)
        sets.append(R)
    return ReachSequence(sets, method, times, meta={"basis": basis.to_list()})


def alg5_reach(D, Mw, Zw, basis, X0, U, N, reduce_order=DEFAULT_REDUCE_ORDER) -> ReachSequence:
    M = compute_Msigma_p(D, Mw, basis)
    return _propagate_poly(M, basis, X0, U, Zw, N, "alg5", reduce_order)


def alg5_constrained_reach(D, Mw, Zw, basis, X0, U, N) -> ReachSequence:
    Ns = compute_Nsigma_p(D, Mw, basis).prune()
    return _propagate_poly(Ns, basis, X0, U, Zw, N, "alg5c")


def alg5_sideinfo_reach(D, Mw, Zw, basis, X0, U, N, info: SideInfo) -> ReachSequence:
    """Side information ``|Q C - Y| <= R`` on the coefficient matrix ``C``."""
    Ns = build_side_info_cmz(compute_Nsigma_p(D, Mw, basis), info, T=D.T).prune()
    return _propagate_poly(Ns, basis, X0, U, Zw, N, "alg5s")
