"""Matrix zonotopes and constrained matrix zonotopes.

Generators are stored as one array of shape ``(gamma, n, p)`` and constraint
generators as ``(gamma, n_c, n_a)``. ``vec`` is column-major everywhere, so a
constraint ``sum_i beta_i A_i = B`` becomes ``[vec(A_1) ... vec(A_gamma)] beta
= vec(B)`` with Fortran-order flattening.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from ddreach import lp
from ddreach.errors import DimensionError, InfeasibleError
from ddreach.sets import PRUNE_TOL, TOL, ConstrainedZonotope, Zonotope


def vec(M: np.ndarray) -> np.ndarray:
    return np.asarray(M, dtype=float).reshape(-1, order="F")


def _gens(G, shape, name="generators") -> np.ndarray:
    if G is None:
        return np.zeros((0,) + shape)
    if isinstance(G, (list, tuple)):
        G = np.array([np.asarray(g, dtype=float) for g in G]) if len(G) else np.zeros((0,) + shape)
    G = np.asarray(G, dtype=float)
    if G.size == 0:
        return np.zeros((G.shape[0] if G.ndim == 3 else 0,) + shape)
    if G.ndim == 2 and G.shape == shape:
        G = G[None]
    if G.ndim != 3 or G.shape[1:] != shape:
        raise DimensionError(f"{name} must have shape (gamma, {shape[0]}, {shape[1]}), got {G.shape}")
    return G


@dataclass(frozen=True)
class FactorBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or np.any(lo > hi) or np.any(lo < -1) or np.any(hi > 1):
            raise ValueError("factor bounds must satisfy -1 <= lower <= upper <= 1")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def magnitude(self) -> np.ndarray:
        """``max(|lower|, |upper|)`` per factor."""
        return np.maximum(np.abs(self.lower), np.abs(self.upper))


@dataclass(frozen=True, eq=False)
class MatrixZonotope:
    """``{C + sum_i beta_i G_i : |beta|_inf <= 1}``."""

    # let numpy defer to our operators for ``array @ set`` and ``array - set``
    __array_ufunc__ = None

    center: np.ndarray
    generators: np.ndarray = field(default=None)

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", C)
        object.__setattr__(self, "generators", _gens(self.generators, C.shape))

    @property
    def shape(self) -> tuple[int, int]:
        return self.center.shape

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def __repr__(self):
        return f"MatrixZonotope(shape={self.shape}, generators={self.n_generators})"

    def __add__(self, other):
        if isinstance(other, ConstrainedMatrixZonotope):
            return ConstrainedMatrixZonotope.from_matrix_zonotope(self) + other
        if isinstance(other, MatrixZonotope):
            if other.shape != self.shape:
                raise DimensionError(f"sum of shapes {self.shape} and {other.shape}")
            return MatrixZonotope(self.center + other.center,
                                  np.concatenate([self.generators, other.generators]))
        X = np.asarray(other, dtype=float)
        if X.shape != self.shape:
            raise DimensionError(f"translation of shape {X.shape} for shape {self.shape}")
        return MatrixZonotope(self.center + X, self.generators)

    __radd__ = __add__

    def __neg__(self):
        return MatrixZonotope(-self.center, -self.generators)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def left_multiply(self, R) -> "MatrixZonotope":
        R = np.atleast_2d(np.asarray(R, dtype=float))
        if R.shape[1] != self.shape[0]:
            raise DimensionError(f"left factor has {R.shape[1]} columns, members have {self.shape[0]} rows")
        return MatrixZonotope(R @ self.center, np.einsum("ij,gjk->gik", R, self.generators))

    def right_multiply(self, H) -> "MatrixZonotope":
        H = np.atleast_2d(np.asarray(H, dtype=float))
        if H.shape[0] != self.shape[1]:
            raise DimensionError(f"right factor has {H.shape[0]} rows, members have {self.shape[1]} columns")
        return MatrixZonotope(self.center @ H, self.generators @ H)

    def __rmatmul__(self, R):
        return self.left_multiply(R)

    def __matmul__(self, H):
        if isinstance(H, Zonotope):
            return mz_times_zonotope(self, H)
        return self.right_multiply(H)

    def member(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float).reshape(-1)
        return self.center + np.tensordot(beta, self.generators, axes=1)

    def sample(self, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        return self.member(rng.uniform(-1.0, 1.0, self.n_generators))

    def contains(self, X, tol=TOL) -> bool:
        return cmz_contains_matrix(self, X, tol)

    def to_dict(self) -> dict:
        return {
            "type": "matrix_zonotope",
            "center": self.center.tolist(),
            "generators": [g.tolist() for g in self.generators],
        }


@dataclass(frozen=True, eq=False)
class ConstrainedMatrixZonotope:
    """``{C + sum_i beta_i G_i : sum_i beta_i A_i = B, |beta|_inf <= 1}``."""

    # let numpy defer to our operators for ``array @ set`` and ``array - set``
    __array_ufunc__ = None

    center: np.ndarray
    generators: np.ndarray
    A: np.ndarray = field(default=None)
    B: np.ndarray = field(default=None)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.center, dtype=float))
        G = _gens(self.generators, C.shape)
        g = G.shape[0]
        B = np.zeros((0, 0)) if self.B is None else np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if B.size == 0:
            B = B.reshape(B.shape if B.ndim == 2 else (0, 0))
        A = _gens(self.A, B.shape, "constraint generators") if self.A is not None else np.zeros((g,) + B.shape)
        if A.shape[0] != g:
            raise DimensionError(f"{A.shape[0]} constraint generators for {g} generators")
        object.__setattr__(self, "center", C)
        object.__setattr__(self, "generators", G)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if self.check and B.size and not lp.feasible(*self.vectorized_constraints()):
            raise InfeasibleError("constrained matrix zonotope has an empty factor set")

    @classmethod
    def from_matrix_zonotope(cls, M: MatrixZonotope) -> "ConstrainedMatrixZonotope":
        return cls(M.center, M.generators, check=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.center.shape

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def __repr__(self):
        return (f"ConstrainedMatrixZonotope(shape={self.shape}, generators={self.n_generators}, "
                f"constraint_shape={self.B.shape})")

    def vectorized_constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """``(A_vec, b_vec)`` with one column ``vec(A_i)`` per factor."""
        g = self.n_generators
        A_vec = self.A.transpose(0, 2, 1).reshape(g, self.B.size).T
        return A_vec, vec(self.B)

    def _with(self, center=None, generators=None) -> "ConstrainedMatrixZonotope":
        return ConstrainedMatrixZonotope(
            self.center if center is None else center,
            self.generators if generators is None else generators,
            self.A, self.B, check=False)

    def left_multiply(self, R) -> "ConstrainedMatrixZonotope":
        R = np.atleast_2d(np.asarray(R, dtype=float))
        if R.shape[1] != self.shape[0]:
            raise DimensionError(f"left factor has {R.shape[1]} columns, members have {self.shape[0]} rows")
        return self._with(R @ self.center, np.einsum("ij,gjk->gik", R, self.generators))

    def right_multiply(self, H) -> "ConstrainedMatrixZonotope":
        H = np.atleast_2d(np.asarray(H, dtype=float))
        if H.shape[0] != self.shape[1]:
            raise DimensionError(f"right factor has {H.shape[0]} rows, members have {self.shape[1]} columns")
        return self._with(self.center @ H, self.generators @ H)

    def __rmatmul__(self, R):
        return self.left_multiply(R)

    def __matmul__(self, other):
        if isinstance(other, ConstrainedZonotope):
            return cmz_times_czonotope(self, other)
        if isinstance(other, Zonotope):
            return cmz_times_zonotope(self, other)
        return self.right_multiply(other)

    def __add__(self, other):
        if isinstance(other, MatrixZonotope):
            other = ConstrainedMatrixZonotope.from_matrix_zonotope(other)
        if isinstance(other, ConstrainedMatrixZonotope):
            return cmz_add(self, other)
        X = np.asarray(other, dtype=float)
        if X.shape != self.shape:
            raise DimensionError(f"translation of shape {X.shape} for shape {self.shape}")
        return self._with(center=self.center + X)

    __radd__ = __add__

    def __neg__(self):
        return self._with(-self.center, -self.generators)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    @functools.cached_property
    def factor_bounds(self) -> FactorBounds:
        return cmz_factor_bounds(self)

    @functools.cached_property
    def _factor_set(self) -> ConstrainedZonotope:
        A, b = self.vectorized_constraints()
        return ConstrainedZonotope(np.zeros(1), np.zeros((1, self.n_generators)), A, b, check=False)

    def member(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float).reshape(-1)
        return self.center + np.tensordot(beta, self.generators, axes=1)

    def sample_factor(self, rng) -> np.ndarray:
        return self._factor_set.sample_factor(rng)

    def sample(self, rng) -> np.ndarray:
        return self.member(self.sample_factor(rng))

    def contains(self, X, tol=TOL) -> bool:
        return cmz_contains_matrix(self, X, tol)

    def prune(self) -> "ConstrainedMatrixZonotope":
        """Drop factors whose generator and constraint generator are both zero."""
        gnorm = np.sqrt((self.generators ** 2).sum(axis=(1, 2)))
        anorm = np.sqrt((self.A ** 2).sum(axis=(1, 2))) if self.A.size else np.zeros(self.n_generators)
        keep = (gnorm >= PRUNE_TOL) | (anorm > 0.0)
        if np.all(keep):
            return self
        return ConstrainedMatrixZonotope(self.center, self.generators[keep], self.A[keep], self.B, check=False)

    def to_dict(self) -> dict:
        return {
            "type": "constrained_matrix_zonotope",
            "center": self.center.tolist(),
            "generators": [g.tolist() for g in self.generators],
            "A": [a.tolist() for a in self.A],
            "B": self.B.tolist(),
        }


def as_cmz(M) -> ConstrainedMatrixZonotope:
    if isinstance(M, ConstrainedMatrixZonotope):
        return M
    return ConstrainedMatrixZonotope.from_matrix_zonotope(M)


# operations ---------------------------------------------------------------

def mz_from_noise_zonotope(Zw: Zonotope, T: int) -> MatrixZonotope:
    """Matrix zonotope of noise sequences ``[w(0) ... w(T-1)]`` with each ``w(k)`` in ``Zw``.

    Generator ``i*T + j`` carries generator ``i`` of ``Zw`` in column ``j``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    n, g = Zw.dim, Zw.n_generators
    C = np.tile(Zw.center[:, None], (1, T))
    G = np.zeros((g * T, n, T))
    for i in range(g):
        for j in range(T):
            G[i * T + j, :, j] = Zw.generators[:, i]
    return MatrixZonotope(C, G)


def mz_affine(X, M: MatrixZonotope, H) -> MatrixZonotope:
    """``(X - M) H`` as a matrix zonotope."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape != M.shape:
        raise DimensionError(f"data matrix {X.shape} does not match member shape {M.shape}")
    return (X - M).right_multiply(H)


def cmz_affine(X, N: ConstrainedMatrixZonotope, H) -> ConstrainedMatrixZonotope:
    """``(X - N) H`` with the constraints of ``N`` carried over."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape != N.shape:
        raise DimensionError(f"data matrix {X.shape} does not match member shape {N.shape}")
    return (X - N).right_multiply(H)


def _cross_generators(G: np.ndarray, Gz: np.ndarray, scale=None) -> np.ndarray:
    """Columns ``scale_k * G_i g_j`` ordered by ``k = j * gamma_N + i``."""
    gN, n, _ = G.shape
    gZ = Gz.shape[1]
    prod = G @ Gz  # (gN, n, gZ): prod[i, :, j] = G_i g_j
    cols = prod.transpose(1, 2, 0).reshape(n, gZ * gN)
    if scale is not None:
        cols = cols * np.asarray(scale).reshape(1, -1)
    return cols


def mz_times_zonotope(M, Z: Zonotope) -> Zonotope:
    """Zonotope enclosure of ``{X z : X in M, z in Z}``."""
    if isinstance(M, ConstrainedMatrixZonotope):
        raise TypeError("use cmz_times_zonotope for constrained matrix zonotopes")
    if M.shape[1] != Z.dim:
        raise DimensionError(f"members have {M.shape[1]} columns, zonotope has dimension {Z.dim}")
    C, G = M.center, M.generators
    n = C.shape[0]
    parts = [
        (G @ Z.center).T.reshape(n, M.n_generators),
        C @ Z.generators,
        _cross_generators(G, Z.generators),
    ]
    return Zonotope(C @ Z.center, np.hstack(parts))


def cmz_linear_map(R, N: ConstrainedMatrixZonotope) -> ConstrainedMatrixZonotope:
    return N.left_multiply(R)


def cmz_add(N1: ConstrainedMatrixZonotope, N2: ConstrainedMatrixZonotope) -> ConstrainedMatrixZonotope:
    """Minkowski sum with block-diagonal constraints."""
    N1, N2 = as_cmz(N1), as_cmz(N2)
    if N1.shape != N2.shape:
        raise DimensionError(f"sum of shapes {N1.shape} and {N2.shape}")
    (r1, c1), (r2, c2) = N1.B.shape, N2.B.shape
    A = np.zeros((N1.n_generators + N2.n_generators, r1 + r2, c1 + c2))
    A[: N1.n_generators, :r1, :c1] = N1.A
    A[N1.n_generators:, r1:, c1:] = N2.A
    B = np.zeros((r1 + r2, c1 + c2))
    B[:r1, :c1] = N1.B
    B[r1:, c1:] = N2.B
    return ConstrainedMatrixZonotope(N1.center + N2.center,
                                     np.concatenate([N1.generators, N2.generators]), A, B, check=False)


def cmz_factor_bounds(N) -> FactorBounds:
    """Tightest per-factor interval over the constrained factor set (2 LPs per constrained factor)."""
    N = as_cmz(N)
    if N.B.size == 0:
        return FactorBounds(-np.ones(N.n_generators), np.ones(N.n_generators))
    A, b = N.vectorized_constraints()
    lo, hi = lp.factor_bounds(A, b)
    return FactorBounds(lo, hi)


def cmz_times_zonotope(N, Z: Zonotope) -> ConstrainedZonotope:
    """Constrained-zonotope enclosure of ``{X z : X in N, z in Z}``.

    Cross terms ``G_i g_j`` are scaled by ``max(|lower_i|, |upper_i|)`` of the
    matrix factor ``i``.
    """
    N = as_cmz(N)
    if N.shape[1] != Z.dim:
        raise DimensionError(f"members have {N.shape[1]} columns, zonotope has dimension {Z.dim}")
    C, G = N.center, N.generators
    n, gN, gZ = C.shape[0], N.n_generators, Z.n_generators
    f = N.factor_bounds.magnitude
    scale = np.tile(f, gZ)
    parts = [
        (G @ Z.center).T.reshape(n, gN),
        C @ Z.generators,
        _cross_generators(G, Z.generators, scale),
    ]
    A_vec, b_vec = N.vectorized_constraints()
    A = np.hstack([A_vec, np.zeros((A_vec.shape[0], gZ + gN * gZ))])
    return ConstrainedZonotope(C @ Z.center, np.hstack(parts), A, b_vec, check=False)


def cmz_times_czonotope(N, Cz: ConstrainedZonotope) -> ConstrainedZonotope:
    """Constrained-zonotope enclosure of ``{X x : X in N, x in Cz}``.

    Cross terms ``G_i g_j`` are scaled by the largest absolute product of the
    bounds of matrix factor ``i`` and set factor ``j``.
    """
    N = as_cmz(N)
    if isinstance(Cz, Zonotope):
        Cz = ConstrainedZonotope.from_zonotope(Cz)
    if N.shape[1] != Cz.dim:
        raise DimensionError(f"members have {N.shape[1]} columns, set has dimension {Cz.dim}")
    C, G = N.center, N.generators
    n, gN, gC = C.shape[0], N.n_generators, Cz.n_generators
    fbN = N.factor_bounds
    lo_c, hi_c = Cz.factor_bounds()
    cands = np.stack([
        np.outer(lo_c, fbN.lower), np.outer(lo_c, fbN.upper),
        np.outer(hi_c, fbN.lower), np.outer(hi_c, fbN.upper),
    ])
    scale = np.abs(cands).max(axis=0).reshape(-1)  # index j * gN + i
    parts = [
        (G @ Cz.center).T.reshape(n, gN),
        C @ Cz.generators,
        _cross_generators(G, Cz.generators, scale),
    ]
    A_vec, b_vec = N.vectorized_constraints()
    rN, rC = A_vec.shape[0], Cz.n_constraints
    total = gN + gC + gN * gC
    A = np.zeros((rN + rC, total))
    A[:rN, :gN] = A_vec
    A[rN:, gN:gN + gC] = Cz.A
    return ConstrainedZonotope(C @ Cz.center, np.hstack(parts), A,
                               np.concatenate([b_vec, Cz.b]), check=False)


def cmz_contains_matrix(N, X, tol: float = TOL) -> bool:
    """Whether ``X`` is a member, by LP feasibility of its factor equations."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N = as_cmz(N)
    if X.shape != N.shape:
        raise DimensionError(f"matrix of shape {X.shape} for member shape {N.shape}")
    g = N.n_generators
    Gv = N.generators.transpose(0, 2, 1).reshape(g, -1).T.reshape(X.size, g)
    rhs = vec(X - N.center)
    if N.B.size:
        A_vec, b_vec = N.vectorized_constraints()
        Gv = np.vstack([Gv, A_vec])
        rhs = np.concatenate([rhs, b_vec])
    if g == 0:
        return bool(np.all(np.abs(rhs) <= tol))
    return lp.feasible(Gv, rhs, tol=tol)


def set_from_dict(doc: dict):
    kind = doc.get("type")
    if kind == "matrix_zonotope":
        return MatrixZonotope(doc["center"], doc["generators"])
    if kind == "constrained_matrix_zonotope":
        return ConstrainedMatrixZonotope(doc["center"], doc["generators"], doc["A"], doc["B"])
    raise ValueError(f"unknown matrix set type {kind!r}")
