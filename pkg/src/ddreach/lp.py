"""Dense linear programs over the unit box.

Every LP in this package has the form

    min/max  c^T beta   s.t.  A beta = b,  -1 <= beta <= 1

which is what factor bounds, support functions, interval hulls and point
membership of (constrained) zonotopes reduce to. The solver is a two-phase
bounded-variable simplex on a dense tableau. Dantzig pricing is used until a
run of degenerate pivots is seen, after which Bland's rule takes over so the
method cannot cycle.
"""

from __future__ import annotations

import enum
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ddreach.errors import InfeasibleError

FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-9
_RANK_TOL = 1e-10
_BLAND_AFTER = 30


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    DEGENERATE = "numerically-degenerate"


@dataclass(frozen=True)
class BoxLP:
    """``min`` or ``max`` of ``objective @ beta`` subject to ``A beta = b`` and ``|beta|_inf <= 1``."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, c.size)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[1] != c.size:
            raise ValueError(f"A must have {c.size} columns, got shape {A.shape}")
        if b.size != A.shape[0]:
            raise ValueError(f"b must have {A.shape[0]} entries, got {b.size}")
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: float
    argument: np.ndarray

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _presolve(A, b, tol):
    """Drop empty and dependent rows and scale the rest to unit norm.

    Returns ``(A, b)`` of the reduced system, or ``None`` when an empty row has
    a nonzero right-hand side.
    """
    norms = np.linalg.norm(A, axis=1)
    empty = norms <= 1e-14
    if np.any(np.abs(b[empty]) > tol):
        return None
    A = A[~empty] / norms[~empty, None]
    b = b[~empty] / norms[~empty]
    if A.shape[0] > 1:
        # rank-revealing QR on A^T picks an independent subset of rows;
        # consistency of the dropped rows is re-checked against the original system
        _, R, perm = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > _RANK_TOL * max(diag[0], 1.0))) if diag.size else 0
        keep = np.sort(perm[:rank])
        A, b = A[keep], b[keep]
    return A, b


class _Tableau:
    """Bounded-variable simplex state for ``A x = b``, ``lo <= x <= hi``."""

    def __init__(self, A, b):
        m, n = A.shape
        self.m, self.n = m, n
        x = np.full(n + m, -1.0)
        resid = b - A @ x[:n]
        sign = np.where(resid >= 0.0, 1.0, -1.0)
        # artificial columns make the starting basis the identity after sign flip
        self.T = np.hstack([A * sign[:, None], np.eye(m)])
        x[n:] = np.abs(resid)
        self.x = x
        self.lo = np.concatenate([np.full(n, -1.0), np.zeros(m)])
        self.hi = np.concatenate([np.full(n, 1.0), np.full(m, np.inf)])
        self.basis = np.arange(n, n + m)
        self.is_basic = np.zeros(n + m, dtype=bool)
        self.is_basic[n:] = True

    def run(self, cost, max_iter):
        """Minimize ``cost @ x``; returns True on optimality, False on the iteration cap."""
        T, x, basis = self.T, self.x, self.basis
        d = cost - cost[basis] @ T
        scale = max(1.0, float(np.max(np.abs(cost))) if cost.size else 1.0)
        dtol = 1e-10 * scale
        bland = False
        degenerate_run = 0
        for _ in range(max_iter):
            free = ~self.is_basic & (self.hi > self.lo)
            at_lo = free & (x <= self.lo + 1e-12)
            cand = (at_lo & (d < -dtol)) | (free & ~at_lo & (d > dtol))
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                return True
            q = int(idx[0]) if bland else int(idx[np.argmax(np.abs(d[idx]))])
            direction = 1.0 if at_lo[q] else -1.0
            alpha = direction * T[:, q]
            xb = x[basis]
            ratios = np.full(self.m, np.inf)
            pos = alpha > _PIVOT_TOL
            neg = alpha < -_PIVOT_TOL
            ratios[pos] = (xb[pos] - self.lo[basis][pos]) / alpha[pos]
            hib = self.hi[basis]
            ratios[neg] = (hib[neg] - xb[neg]) / -alpha[neg]
            np.maximum(ratios, 0.0, out=ratios)
            flip = self.hi[q] - self.lo[q]
            theta = float(ratios.min()) if self.m else np.inf
            if flip <= theta:
                theta = flip
                row = -1
            else:
                ties = np.flatnonzero(ratios <= theta + 1e-12)
                if bland:
                    row = int(ties[np.argmin(basis[ties])])
                else:
                    row = int(ties[np.argmax(np.abs(alpha[ties]))])
            if not np.isfinite(theta):
                return False
            x[basis] = xb - theta * alpha
            x[q] += direction * theta
            if theta <= 1e-12:
                degenerate_run += 1
                if degenerate_run >= _BLAND_AFTER:
                    bland = True
            else:
                degenerate_run = 0
            if row < 0:
                continue
            leaving = basis[row]
            x[leaving] = self.lo[leaving] if alpha[row] > 0 else self.hi[leaving]
            self._pivot(row, q)
            d = d - d[q] * T[row]
            d[q] = 0.0
        return False

    def _pivot(self, row, q):
        T = self.T
        T[row] /= T[row, q]
        col = T[:, q].copy()
        col[row] = 0.0
        T -= np.outer(col, T[row])
        self.is_basic[self.basis[row]] = False
        self.is_basic[q] = True
        self.basis[row] = q

    def drop_artificials(self):
        """Pivot zero-level artificials out of the basis and fix them at zero."""
        n = self.n
        for row in range(self.m):
            if self.basis[row] < n:
                continue
            cand = ~self.is_basic[:n] & (np.abs(self.T[row, :n]) > 1e-7)
            idx = np.flatnonzero(cand)
            if idx.size:
                q = int(idx[np.argmax(np.abs(self.T[row, idx]))])
                self.x[self.basis[row]] = 0.0
                self._pivot(row, q)
        self.hi[n:] = 0.0
        self.x[n:][~self.is_basic[n:]] = 0.0


def _refine(A, b, x, basis_cols):
    """Recompute basic values from the nonbasic ones to remove accumulated drift."""
    if not basis_cols.size:
        return x
    nb = np.ones(A.shape[1], dtype=bool)
    nb[basis_cols] = False
    rhs = b - A[:, nb] @ x[nb]
    try:
        xb = np.linalg.solve(A[:, basis_cols], rhs)
    except np.linalg.LinAlgError:
        return x
    out = x.copy()
    out[basis_cols] = xb
    return out


def solve(lp: BoxLP, tol: float = FEAS_TOL, max_iter: int | None = None) -> LPResult:
    """Solve a box-constrained LP.

    Returns an optimal basic solution, or a result with status ``infeasible``
    when ``{A beta = b, |beta|_inf <= 1}`` is empty. ``tol`` bounds both the
    equality residual and the box violation of the returned argument.
    """
    c = lp.objective if lp.sense == "min" else -lp.objective
    n = c.size
    nan = np.full(n, np.nan)
    pre = _presolve(lp.A, lp.b, tol)
    if pre is None:
        return LPResult(LPStatus.INFEASIBLE, np.nan, nan)
    A, b = pre
    m = A.shape[0]
    if max_iter is None:
        max_iter = 50 * (n + m) + 100

    tab = _Tableau(A, b)
    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    if m:
        if not tab.run(phase1, max_iter):
            return LPResult(LPStatus.DEGENERATE, np.nan, nan)
        if float(np.sum(tab.x[n:])) > tol * max(1.0, m ** 0.5):
            return LPResult(LPStatus.INFEASIBLE, np.nan, nan)
        tab.drop_artificials()
    if np.any(c):
        if not tab.run(np.concatenate([c, np.zeros(m)]), max_iter):
            return LPResult(LPStatus.DEGENERATE, np.nan, nan)

    raw = tab.x[:n].copy()
    basic = tab.basis[tab.basis < n]
    # refinement removes equality drift but can push an ill-conditioned basis
    # just outside the box, so the unrefined point is kept as a fallback
    candidates = [_refine(A, b, raw, basic), raw] if basic.size == m else [raw]
    row_scale = np.maximum(1.0, np.linalg.norm(lp.A, axis=1))
    worst = np.inf
    for x in candidates:
        x = np.where(np.abs(x) > 1.0, np.clip(x, -1.0, 1.0), x) if np.all(np.abs(x) <= 1.0 + tol) else x
        resid = np.abs(lp.A @ x - lp.b)
        if not (np.any(np.abs(x) > 1.0 + tol) or np.any(resid > tol * row_scale)):
            break
        worst = min(worst, float(np.max(resid / row_scale)))
    else:
        # dropped rows disagree with the kept ones, or drift could not be repaired
        if worst > 1e3 * tol:
            return LPResult(LPStatus.INFEASIBLE, np.nan, nan)
        return LPResult(LPStatus.DEGENERATE, np.nan, nan)
    return LPResult(LPStatus.OPTIMAL, float(lp.objective @ x), x)


def feasible(A, b, tol: float = FEAS_TOL) -> bool:
    """Whether ``{beta : A beta = b, |beta|_inf <= 1}`` is non-empty."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.size == 0:
        return not np.any(np.abs(b) > tol)
    res = solve(BoxLP(np.zeros(A.shape[1]), A, b), tol=tol)
    if res.status is LPStatus.DEGENERATE:
        raise ArithmeticError("feasibility LP stalled; constraints are numerically degenerate")
    return res.optimal


_BOUNDS_CACHE: OrderedDict = OrderedDict()
_BOUNDS_CACHE_SIZE = 256
_FACE_TOL = 1e-12


def _component_bounds(A, b):
    key = (A.shape, A.tobytes(), b.tobytes())
    hit = _BOUNDS_CACHE.get(key)
    if hit is not None:
        _BOUNDS_CACHE.move_to_end(key)
        return hit
    k = A.shape[1]
    lower = np.full(k, np.nan)
    upper = np.full(k, np.nan)
    e = np.zeros(k)

    def record(res):
        # a feasible point sitting on a box face certifies that bound outright
        x = res.argument
        lower[np.isnan(lower) & (x <= -1.0 + _FACE_TOL)] = -1.0
        upper[np.isnan(upper) & (x >= 1.0 - _FACE_TOL)] = 1.0

    for j in range(k):
        for sense, out in (("min", lower), ("max", upper)):
            if not np.isnan(out[j]):
                continue
            e[:] = 0.0
            e[j] = 1.0
            res = solve(BoxLP(e, A, b, sense))
            if not res.optimal:
                if res.status is LPStatus.INFEASIBLE:
                    raise InfeasibleError("constraint set {A beta = b, |beta| <= 1} is empty")
                raise ArithmeticError("factor-bound LP did not converge")
            out[j] = res.value
            record(res)
    lower = np.clip(lower, -1.0, 1.0)
    upper = np.clip(upper, lower, 1.0)
    _BOUNDS_CACHE[key] = (lower, upper)
    if len(_BOUNDS_CACHE) > _BOUNDS_CACHE_SIZE:
        _BOUNDS_CACHE.popitem(last=False)
    return lower, upper


def components(A) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a constraint matrix into independent blocks.

    Returns ``(rows, cols)`` index pairs; two factors share a block when some
    row couples them. Factors absent from every row and all-zero rows are not
    part of any block.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    nz = A != 0.0
    cols = np.flatnonzero(nz.any(axis=0))
    if cols.size == 0:
        return []
    sub = csr_matrix(nz[:, cols].astype(np.int8))
    adjacency = (sub.T @ sub).tocsr()
    ncomp, labels = connected_components(adjacency, directed=False)
    out = []
    for comp in range(ncomp):
        ccols = cols[labels == comp]
        rows = np.flatnonzero(nz[:, ccols].any(axis=1))
        out.append((rows, ccols))
    return out


def factor_bounds(A, b) -> tuple[np.ndarray, np.ndarray]:
    """Per-factor minimum and maximum over ``{A beta = b, |beta|_inf <= 1}``.

    The constraint matrix is split into independent blocks and each block is
    solved separately; identical blocks are solved once. Factors that appear in
    no constraint get ``[-1, 1]``. Raises InfeasibleError for an empty
    constraint set.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    k = A.shape[1]
    lower = -np.ones(k)
    upper = np.ones(k)
    if A.shape[0] == 0 or k == 0:
        if np.any(np.abs(b) > FEAS_TOL):
            raise InfeasibleError("empty constraint row with nonzero right-hand side")
        return lower, upper
    empty_rows = ~(A != 0.0).any(axis=1)
    if np.any(np.abs(b[empty_rows]) > FEAS_TOL):
        raise InfeasibleError("empty constraint row with nonzero right-hand side")
    for rows, ccols in components(A):
        lo, hi = _component_bounds(np.ascontiguousarray(A[np.ix_(rows, ccols)]), np.ascontiguousarray(b[rows]))
        lower[ccols] = lo
        upper[ccols] = hi
    return lower, upper
