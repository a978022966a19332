"""Intervals, zonotopes and constrained zonotopes.

Sets are immutable. Binary operations return new objects; the module-level
functions at the bottom are thin aliases kept for callers that prefer a
functional style.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ddreach import lp
from ddreach.errors import DimensionError, InfeasibleError

TOL = 1e-9
# generators shorter than this (Frobenius/2-norm) are treated as structural zeros
PRUNE_TOL = 1e-14


def _vec(x, name="vector") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _mat(G, rows, name="generators") -> np.ndarray:
    arr = np.asarray(G, dtype=float)
    if arr.size == 0:
        return np.zeros((rows, 0))
    if arr.ndim == 1:
        arr = arr.reshape(rows, -1) if rows else arr.reshape(0, -1)
    if arr.ndim != 2 or arr.shape[0] != rows:
        raise DimensionError(f"{name} must have {rows} rows, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _directions(d, n) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    single = d.ndim == 1
    D = d.reshape(1, -1) if single else d
    if D.shape[1] != n:
        raise DimensionError(f"direction must have {n} entries, got {D.shape[1]}")
    if np.any(np.linalg.norm(D, axis=1) == 0.0):
        raise ValueError("support direction must be nonzero")
    return D


@dataclass(frozen=True)
class Interval:
    """Axis-aligned box ``{x : lower <= x <= upper}``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = _vec(self.lower, "lower"), _vec(self.upper, "upper")
        if lo.shape != hi.shape:
            raise DimensionError(f"bounds have different sizes: {lo.size} and {hi.size}")
        if np.any(lo > hi):
            raise ValueError("interval lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    def contains(self, x, tol=TOL) -> bool:
        x = _vec(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def to_zonotope(self) -> "Zonotope":
        r = self.radius
        keep = r > 0.0
        return Zonotope(self.center, np.diag(r)[:, keep])

    def to_dict(self) -> dict:
        return {"type": "interval", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class Zonotope:
    """``{c + G beta : |beta|_inf <= 1}`` with center ``c`` (n,) and generators ``G`` (n, gamma)."""

    # let numpy defer to our operators for ``array @ set`` and ``array - set``
    __array_ufunc__ = None

    center: np.ndarray
    generators: np.ndarray = field(default=None)

    def __post_init__(self):
        c = _vec(self.center, "center")
        G = _mat(np.zeros((c.size, 0)) if self.generators is None else self.generators, c.size)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def n_generators(self) -> int:
        return self.generators.shape[1]

    @property
    def order(self) -> float:
        return self.n_generators / max(self.dim, 1)

    def __repr__(self):
        return f"Zonotope(dim={self.dim}, generators={self.n_generators})"

    # -- operations -------------------------------------------------------
    def linear_map(self, L) -> "Zonotope":
        L = np.atleast_2d(np.asarray(L, dtype=float))
        if L.shape[1] != self.dim:
            raise DimensionError(f"map has {L.shape[1]} columns, set has dimension {self.dim}")
        return Zonotope(L @ self.center, L @ self.generators)

    def __rmatmul__(self, L):
        return self.linear_map(L)

    def __add__(self, other):
        if isinstance(other, ConstrainedZonotope):
            return other + self
        if isinstance(other, Zonotope):
            if other.dim != self.dim:
                raise DimensionError(f"Minkowski sum of dimensions {self.dim} and {other.dim}")
            return Zonotope(self.center + other.center, np.hstack([self.generators, other.generators]))
        v = _vec(other)
        if v.size != self.dim:
            raise DimensionError(f"translation of size {v.size} for dimension {self.dim}")
        return Zonotope(self.center + v, self.generators)

    __radd__ = __add__

    def __neg__(self):
        return Zonotope(-self.center, -self.generators)

    def __sub__(self, other):
        # Z1 - Z2 means Z1 + (-1) Z2, not the Pontryagin difference
        if isinstance(other, (Zonotope, ConstrainedZonotope)):
            return self + (-other)
        return self + (-_vec(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: float) -> "Zonotope":
        return Zonotope(factor * self.center, factor * self.generators)

    def cartesian(self, other) -> "Zonotope | ConstrainedZonotope":
        if isinstance(other, ConstrainedZonotope):
            return ConstrainedZonotope.from_zonotope(self).cartesian(other)
        G = scipy.linalg.block_diag(self.generators, other.generators)
        G = G.reshape(self.dim + other.dim, self.n_generators + other.n_generators)
        return Zonotope(np.concatenate([self.center, other.center]), G)

    def interval_hull(self) -> Interval:
        r = np.abs(self.generators).sum(axis=1)
        return Interval(self.center - r, self.center + r)

    def support(self, d) -> float | np.ndarray:
        """Support function ``max_{x in Z} d^T x``; accepts one direction or a stack of rows."""
        D = _directions(d, self.dim)
        vals = D @ self.center + np.abs(D @ self.generators).sum(axis=1)
        return float(vals[0]) if np.ndim(d) == 1 else vals

    def contains_point(self, x, tol=TOL) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=float).reshape(1, -1), tol)[0])

    def contains_points(self, X, tol=TOL) -> np.ndarray:
        """Membership of each row of ``X``."""
        return self._as_constrained._contains_points(X, tol)

    @functools.cached_property
    def _as_constrained(self):
        return ConstrainedZonotope.from_zonotope(self)

    def reduce(self, max_order: float) -> "Zonotope":
        """Girard box reduction to at most ``dim * max_order`` generators."""
        if max_order < 1:
            raise ValueError("max_order must be at least 1")
        n, g = self.dim, self.n_generators
        if g <= n * max_order:
            return self
        G = self.generators
        n_keep = int(np.floor(n * max_order)) - n
        score = np.abs(G).sum(axis=0) - np.abs(G).max(axis=0)
        order = np.argsort(score, kind="stable")
        boxed = order[: g - n_keep]
        kept = np.sort(order[g - n_keep:])
        box = np.diag(np.abs(G[:, boxed]).sum(axis=1))
        return Zonotope(self.center, np.hstack([G[:, kept], box]))

    def compact(self) -> "Zonotope":
        """Drop zero generators and merge parallel ones (set unchanged up to rounding)."""
        return Zonotope(self.center, _merge_parallel(self.generators))

    def sample_point(self, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        return self.center + self.generators @ rng.uniform(-1.0, 1.0, self.n_generators)

    def sample_points(self, count: int, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        beta = rng.uniform(-1.0, 1.0, (count, self.n_generators))
        return self.center + beta @ self.generators.T

    def vertices_2d(self) -> np.ndarray:
        """Polygon vertices (counter-clockwise) of a 2-D zonotope."""
        if self.dim != 2:
            raise DimensionError("polygon vertices need a 2-D zonotope")
        G = _merge_parallel(self.generators, residual=False)
        if G.shape[1] == 0:
            return self.center.reshape(1, 2)
        # orient generators to the upper half plane, then sweep by angle
        flip = (G[1] < 0) | ((G[1] == 0) & (G[0] < 0))
        G = np.where(flip, -G, G)
        G = G[:, np.argsort(np.arctan2(G[1], G[0]), kind="stable")]
        start = self.center - G.sum(axis=1)
        steps = np.hstack([2 * G, -2 * G])
        return start + np.vstack([np.zeros(2), np.cumsum(steps.T, axis=0)[:-1]])

    def to_dict(self) -> dict:
        return {
            "type": "zonotope",
            "center": self.center.tolist(),
            "generators": self.generators.tolist(),
            "A": [],
            "b": [],
        }


def _merge_parallel(G: np.ndarray, residual: bool = True) -> np.ndarray:
    """Combine parallel columns of ``G`` into one column each.

    Columns are grouped by their normalized direction rounded to 1e-9. A group
    ``{g_i}`` becomes ``(sum_i |g_i . u|) u`` along the group direction ``u``;
    when ``residual`` is set, the perpendicular leftovers are kept as an
    axis-aligned box so the result always contains the input.
    """
    n, g = G.shape
    if g == 0:
        return G
    norms = np.linalg.norm(G, axis=0)
    keep = norms > PRUNE_TOL
    G, norms = G[:, keep], norms[keep]
    if G.shape[1] <= 1:
        return G
    U = G / norms
    lead = np.argmax(np.abs(U) > 1e-6, axis=0)
    sign = np.sign(U[lead, np.arange(U.shape[1])])
    U = U * sign
    keys = np.round(U * 1e9).astype(np.int64)
    _, first, inverse = np.unique(keys.T, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    if first.size == G.shape[1]:
        return G
    out = []
    box = np.zeros(n)
    for grp in np.argsort(first, kind="stable"):
        members = np.flatnonzero(inverse == grp)
        if members.size == 1:
            out.append(G[:, members[0]])
            continue
        u = U[:, members[0]]
        proj = u @ G[:, members]
        out.append(np.abs(proj).sum() * u)
        if residual:
            box += np.abs(G[:, members] - np.outer(u, proj)).sum(axis=1)
    M = np.column_stack(out)
    if residual and np.any(box > PRUNE_TOL):
        M = np.hstack([M, np.diag(box)[:, box > PRUNE_TOL]])
    return M


@dataclass(frozen=True, eq=False)
class ConstrainedZonotope:
    """``{c + G beta : A beta = b, |beta|_inf <= 1}``.

    The factor set is checked for non-emptiness on construction unless
    ``check=False`` is passed (used internally where emptiness is already
    ruled out).
    """

    # let numpy defer to our operators for ``array @ set`` and ``array - set``
    __array_ufunc__ = None

    center: np.ndarray
    generators: np.ndarray
    A: np.ndarray = field(default=None)
    b: np.ndarray = field(default=None)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        c = _vec(self.center, "center")
        G = _mat(self.generators, c.size)
        g = G.shape[1]
        A = np.zeros((0, g)) if self.A is None else np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, g))
        if A.ndim != 2 or A.shape[1] != g:
            raise DimensionError(f"constraint matrix must have {g} columns, got shape {A.shape}")
        b = np.zeros(0) if self.b is None else _vec(self.b, "b")
        if b.size != A.shape[0]:
            raise DimensionError(f"constraint vector must have {A.shape[0]} entries, got {b.size}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "generators", G)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if self.check and A.shape[0] and not lp.feasible(A, b):
            raise InfeasibleError("constrained zonotope has an empty factor set")

    @classmethod
    def from_zonotope(cls, Z: Zonotope) -> "ConstrainedZonotope":
        return cls(Z.center, Z.generators, check=False)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def n_generators(self) -> int:
        return self.generators.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    def __repr__(self):
        return (f"ConstrainedZonotope(dim={self.dim}, generators={self.n_generators}, "
                f"constraints={self.n_constraints})")

    def _with(self, center=None, generators=None, A=None, b=None) -> "ConstrainedZonotope":
        return ConstrainedZonotope(
            self.center if center is None else center,
            self.generators if generators is None else generators,
            self.A if A is None else A,
            self.b if b is None else b,
            check=False,
        )

    # -- operations -------------------------------------------------------
    def linear_map(self, L) -> "ConstrainedZonotope":
        L = np.atleast_2d(np.asarray(L, dtype=float))
        if L.shape[1] != self.dim:
            raise DimensionError(f"map has {L.shape[1]} columns, set has dimension {self.dim}")
        return self._with(L @ self.center, L @ self.generators)

    def __rmatmul__(self, L):
        return self.linear_map(L)

    def __add__(self, other):
        if isinstance(other, Zonotope):
            other = ConstrainedZonotope.from_zonotope(other)
        if isinstance(other, ConstrainedZonotope):
            if other.dim != self.dim:
                raise DimensionError(f"Minkowski sum of dimensions {self.dim} and {other.dim}")
            A = scipy.linalg.block_diag(self.A, other.A).reshape(
                self.n_constraints + other.n_constraints, self.n_generators + other.n_generators)
            return ConstrainedZonotope(
                self.center + other.center,
                np.hstack([self.generators, other.generators]),
                A, np.concatenate([self.b, other.b]), check=False)
        v = _vec(other)
        if v.size != self.dim:
            raise DimensionError(f"translation of size {v.size} for dimension {self.dim}")
        return self._with(center=self.center + v)

    __radd__ = __add__

    def __neg__(self):
        return self._with(-self.center, -self.generators)

    def __sub__(self, other):
        if isinstance(other, (Zonotope, ConstrainedZonotope)):
            return self + (-other)
        return self + (-_vec(other))

    def __rsub__(self, other):
        return (-self) + other

    def cartesian(self, other) -> "ConstrainedZonotope":
        if isinstance(other, Zonotope):
            other = ConstrainedZonotope.from_zonotope(other)
        n1, n2 = self.dim, other.dim
        g1, g2 = self.n_generators, other.n_generators
        G = scipy.linalg.block_diag(self.generators, other.generators).reshape(n1 + n2, g1 + g2)
        A = scipy.linalg.block_diag(self.A, other.A).reshape(
            self.n_constraints + other.n_constraints, g1 + g2)
        return ConstrainedZonotope(
            np.concatenate([self.center, other.center]), G, A,
            np.concatenate([self.b, other.b]), check=False)

    def factor_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return lp.factor_bounds(self.A, self.b)

    @functools.cached_property
    def _blocks(self):
        """Independent constraint blocks plus the unconstrained factor indices."""
        blocks = lp.components(self.A) if self.n_constraints else []
        used = np.zeros(self.n_generators, dtype=bool)
        for _, cols in blocks:
            used[cols] = True
        return blocks, np.flatnonzero(~used)

    def _support_one(self, d) -> float:
        blocks, free = self._blocks
        proj = d @ self.generators
        total = float(d @ self.center + np.abs(proj[free]).sum())
        for rows, cols in blocks:
            res = lp.solve(lp.BoxLP(proj[cols], self.A[np.ix_(rows, cols)], self.b[rows], "max"))
            if not res.optimal:
                if res.status is lp.LPStatus.INFEASIBLE:
                    raise InfeasibleError("constrained zonotope has an empty factor set")
                raise ArithmeticError("support LP did not converge")
            total += res.value
        return total

    def support(self, d) -> float | np.ndarray:
        """Support function; one LP per constraint block, closed form for free factors."""
        D = _directions(d, self.dim)
        vals = np.array([self._support_one(row) for row in D])
        return float(vals[0]) if np.ndim(d) == 1 else vals

    def interval_hull(self) -> Interval:
        eye = np.eye(self.dim)
        upper = np.array([self._support_one(e) for e in eye])
        lower = -np.array([self._support_one(-e) for e in eye])
        return Interval(lower, np.maximum(upper, lower))

    @functools.cached_property
    def _projector(self):
        M = np.vstack([self.generators, self.A])
        return M, np.linalg.pinv(M) if M.size else np.zeros((M.shape[1], M.shape[0]))

    def _contains_points(self, X, tol=TOL, iters=300) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionError(f"points have {X.shape[1]} coordinates, set has dimension {self.dim}")
        M, P = self._projector
        R = np.hstack([X - self.center, np.tile(self.b, (X.shape[0], 1))])
        out = np.zeros(X.shape[0], dtype=bool)
        if self.n_generators == 0:
            return np.all(np.abs(R) <= tol, axis=1)
        # alternating projections, started from a feasible anchor, give a cheap
        # certificate for interior points; anything not certified goes to the LP
        anchor = self._anchor if self.n_constraints else np.zeros(self.n_generators)
        beta = anchor + (R - anchor @ M.T) @ P.T
        pending = np.arange(X.shape[0])
        scale = np.maximum(1.0, np.linalg.norm(M, axis=1))
        for _ in range(iters):
            ok = (np.abs(beta).max(axis=1) <= 1.0 + tol) & np.all(
                np.abs(beta @ M.T - R[pending]) <= tol * scale, axis=1)
            out[pending[ok]] = True
            pending, beta = pending[~ok], beta[~ok]
            if pending.size == 0:
                break
            np.clip(beta, -1.0, 1.0, out=beta)
            beta = beta + (R[pending] - beta @ M.T) @ P.T
        for i in pending:
            out[i] = lp.feasible(M, R[i], tol=tol)
        return out

    def contains_point(self, x, tol=TOL) -> bool:
        return bool(self._contains_points(np.asarray(x, dtype=float).reshape(1, -1), tol)[0])

    def contains_points(self, X, tol=TOL) -> np.ndarray:
        return self._contains_points(X, tol)

    def compact(self) -> "ConstrainedZonotope":
        """Equivalent, smaller representation.

        Factors with a zero generator and no constraint entries are dropped,
        parallel unconstrained generators are merged, and linearly dependent
        constraint rows are removed block by block. Zero generators that carry
        constraint entries are kept since they still restrict other factors.
        """
        G, A, b = self.generators, self.A, self.b
        constrained = np.any(A != 0.0, axis=0) if A.shape[0] else np.zeros(G.shape[1], dtype=bool)
        Gc, Ac = G[:, constrained], A[:, constrained]
        Gf = _merge_parallel(G[:, ~constrained])
        A_rows, b_rows = [], []
        col_blocks = lp.components(Ac) if Ac.shape[0] else []
        for rows, cols in col_blocks:
            sub, rhs = _independent_rows(Ac[np.ix_(rows, cols)], b[rows])
            full = np.zeros((sub.shape[0], Ac.shape[1]))
            full[:, cols] = sub
            A_rows.append(full)
            b_rows.append(rhs)
        kept_rows = np.flatnonzero(~np.any(Ac != 0.0, axis=1)) if Ac.shape[0] else np.zeros(0, int)
        if kept_rows.size and np.any(np.abs(b[kept_rows]) > TOL):
            raise InfeasibleError("constrained zonotope has an empty factor set")
        Anew = np.vstack(A_rows) if A_rows else np.zeros((0, Ac.shape[1]))
        bnew = np.concatenate(b_rows) if b_rows else np.zeros(0)
        Anew = np.hstack([Anew, np.zeros((Anew.shape[0], Gf.shape[1]))])
        return ConstrainedZonotope(self.center, np.hstack([Gc, Gf]), Anew, bnew, check=False)

    def feasible_factor(self, rng=None, vertices: int = 6) -> np.ndarray:
        """A feasible factor vector away from the box faces where possible.

        Each constraint block gets the average of several LP vertices for
        random objectives; unconstrained factors are zero.
        """
        beta = np.zeros(self.n_generators)
        if self.n_constraints == 0:
            return beta
        rng = np.random.default_rng(0 if rng is None else rng)
        blocks, _ = self._blocks
        for rows, cols in blocks:
            A, b = self.A[np.ix_(rows, cols)], self.b[rows]
            pts = []
            for _ in range(vertices):
                res = lp.solve(lp.BoxLP(rng.normal(size=cols.size), A, b))
                if res.status is lp.LPStatus.INFEASIBLE:
                    raise InfeasibleError("constrained zonotope has an empty factor set")
                if res.optimal:
                    pts.append(res.argument)
            if not pts:
                raise ArithmeticError("could not find a feasible factor")
            beta[cols] = np.mean(pts, axis=0)
        return beta

    @functools.cached_property
    def _anchor(self):
        return self.feasible_factor(0)

    def sample_factor(self, rng) -> np.ndarray:
        """A feasible factor vector; not uniformly distributed.

        A uniform box proposal is projected onto ``{A beta = b}`` and, when it
        leaves the box, pulled back toward a feasible anchor just far enough to
        re-enter it (the segment stays in the affine subspace).
        """
        rng = np.random.default_rng(rng)
        g = self.n_generators
        prop = rng.uniform(-1.0, 1.0, g)
        if self.n_constraints == 0:
            return prop
        anchor = self._anchor
        Ap = np.linalg.pinv(self.A)
        prop = prop - Ap @ (self.A @ prop - self.b)
        step = prop - anchor
        t = 1.0
        for i in np.flatnonzero(np.abs(prop) > 1.0):
            bound = np.sign(step[i])
            t = min(t, (bound - anchor[i]) / step[i]) if step[i] != 0 else t
        return anchor + max(t, 0.0) * step

    def sample_point(self, rng) -> np.ndarray:
        return self.center + self.generators @ self.sample_factor(rng)

    def sample_points(self, count: int, rng) -> np.ndarray:
        rng = np.random.default_rng(rng)
        return np.array([self.sample_point(rng) for _ in range(count)]).reshape(count, self.dim)

    def to_dict(self) -> dict:
        return {
            "type": "constrained_zonotope",
            "center": self.center.tolist(),
            "generators": self.generators.tolist(),
            "A": self.A.tolist(),
            "b": self.b.tolist(),
        }


def _independent_rows(A, b):
    """Row subset of ``A beta = b`` with the same solution set (when consistent)."""
    if A.shape[0] <= 1:
        return A, b
    _, R, perm = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-10 * max(diag[0], 1e-300))) if diag.size else 0
    keep = np.sort(perm[:rank])
    return A[keep], b[keep]


def set_from_dict(doc: dict):
    """Inverse of ``to_dict`` for all set types."""
    kind = doc.get("type")
    if kind == "interval":
        return Interval(doc["lower"], doc["upper"])
    n = len(doc["center"])
    G = np.asarray(doc["generators"], dtype=float).reshape(n, -1) if n else np.zeros((0, 0))
    if kind == "zonotope":
        return Zonotope(doc["center"], G)
    if kind == "constrained_zonotope":
        A = np.asarray(doc["A"], dtype=float).reshape(-1, G.shape[1]) if doc["A"] else None
        return ConstrainedZonotope(doc["center"], G, A, doc["b"] or None)
    raise ValueError(f"unknown set type {kind!r}")


# functional aliases -------------------------------------------------------

def zono_linear_map(L, Z: Zonotope) -> Zonotope:
    return Z.linear_map(L)


def zono_minkowski_sum(Z1: Zonotope, Z2: Zonotope) -> Zonotope:
    return Z1 + Z2


def zono_cartesian_product(Z1: Zonotope, Z2: Zonotope) -> Zonotope:
    return Z1.cartesian(Z2)


def zono_interval_hull(Z: Zonotope) -> Interval:
    return Z.interval_hull()


def interval_to_zonotope(I: Interval) -> Zonotope:
    return I.to_zonotope()


def czono_linear_map(L, C: ConstrainedZonotope) -> ConstrainedZonotope:
    return C.linear_map(L)


def czono_minkowski_sum(C: ConstrainedZonotope, Z) -> ConstrainedZonotope:
    return C + Z


def czono_cartesian_product(C: ConstrainedZonotope, Z) -> ConstrainedZonotope:
    return C.cartesian(Z)


def czono_interval_hull(C: ConstrainedZonotope) -> Interval:
    return C.interval_hull()


def support_function(S, d):
    return S.support(d)


def contains_point(S, x, tol: float = TOL) -> bool:
    return S.contains_point(x, tol)


def zonotope_reduce(Z: Zonotope, max_order: float) -> Zonotope:
    return Z.reduce(max_order)


def sample_point(S, rng_seed) -> np.ndarray:
    return S.sample_point(rng_seed)
