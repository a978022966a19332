"""Data-driven reachability for linear systems.

Every method builds a set of models consistent with the recorded data and the
noise bounds, then propagates ``R_{k+1} = M (R_k x U_k) + Z_w`` through it.
Method tags used in outputs: ``alg1`` (matrix zonotope), ``alg2`` (exact noise
constraints), ``alg3`` (constraints plus side information), ``prop4`` and
``prop5`` (measurement noise with a known offset bound) and ``alg4``
(measurement noise, heuristic residual bound).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ddreach.data import DataMatrices, kernel_basis, right_inverse
from ddreach.errors import DimensionError, InfeasibleError, UnsupportedRegimeError
from ddreach.matrix_sets import (
    ConstrainedMatrixZonotope,
    MatrixZonotope,
    as_cmz,
    cmz_affine,
    cmz_times_czonotope,
    cmz_times_zonotope,
    mz_affine,
    mz_from_noise_zonotope,
    mz_times_zonotope,
)
from ddreach.sets import ConstrainedZonotope, Interval, Zonotope

DEFAULT_REDUCE_ORDER = 20


@dataclass(frozen=True)
class SideInfo:
    """Prior knowledge ``|Q [A B] - Y| <= R`` (element-wise)."""

    Q: np.ndarray
    Y: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if Y.shape != R.shape or Y.shape[0] != Q.shape[0]:
            raise DimensionError(f"side information shapes Q{Q.shape}, Y{Y.shape}, R{R.shape} disagree")
        if np.any(R < 0):
            raise ValueError("side-information bounds R must be non-negative")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "R", R)

    def holds_for(self, M, tol=0.0) -> bool:
        return bool(np.all(np.abs(self.Q @ M - self.Y) <= self.R + tol))


@dataclass
class ReachSequence:
    """Reachable sets ``R_0 ... R_N`` with the method that produced them."""

    sets: list
    method: str
    step_times: list = field(default_factory=list)
    heuristic: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, k):
        return self.sets[k]

    def __iter__(self):
        return iter(self.sets)

    @property
    def horizon(self) -> int:
        return len(self.sets) - 1

    def interval_hulls(self) -> list[Interval]:
        return [s.interval_hull() for s in self.sets]

    def to_dict(self, timing: bool = False) -> dict:
        doc = {
            "method": self.method,
            "heuristic": self.heuristic,
            "sets": [s.to_dict() for s in self.sets],
            "interval_hulls": [h.to_dict() for h in self.interval_hulls()],
            "meta": self.meta,
        }
        if timing:
            doc["step_times"] = list(self.step_times)
        return doc


def _input_list(U, N):
    if isinstance(U, (Zonotope, ConstrainedZonotope)):
        return [U] * N
    U = list(U)
    if len(U) < N:
        raise DimensionError(f"{len(U)} input sets for horizon {N}")
    return U


def _propagate(model, X0, U, Zw, N, method, reduce_order=None, pre=None, extra=(), meta=None,
               heuristic=False) -> ReachSequence:
    """Shared recursion ``R_{k+1} = model (pre(R_k) x U_k) + Zw + extra``."""
    U = _input_list(U, N)
    sets, times = [X0], []
    R = X0
    for k in range(N):
        t0 = time.perf_counter()
        S = pre(R) if pre is not None else R
        Zin = S.cartesian(U[k])
        if isinstance(model, MatrixZonotope):
            R = mz_times_zonotope(model, Zin)
        elif isinstance(model, ConstrainedMatrixZonotope):
            R = cmz_times_czonotope(model, Zin) if isinstance(Zin, ConstrainedZonotope) else cmz_times_zonotope(model, Zin)
        else:
            R = Zin.linear_map(model)
        R = R + Zw
        for Z in extra:
            R = R + Z
        R = R.compact()
        if isinstance(R, Zonotope) and reduce_order:
            R = R.reduce(reduce_order)
        times.append(time.perf_counter() - t0)
        sets.append(R)
    return ReachSequence(sets, method, times, heuristic, meta or {})


# model sets ---------------------------------------------------------------

def compute_Msigma(D: DataMatrices, Mw: MatrixZonotope) -> MatrixZonotope:
    """All ``[A B]`` with ``X_plus - W = A X_minus + B U_minus`` for some ``W`` in ``Mw``."""
    H = right_inverse(D.Z_minus)
    return mz_affine(D.X_plus, Mw, H)


def constrain_noise(X_plus, Mw: MatrixZonotope, K: np.ndarray) -> ConstrainedMatrixZonotope:
    """Noise matrices ``W`` in ``Mw`` with ``(X_plus - W) K = 0`` for a data kernel basis ``K``."""
    if K.shape[1] == 0:
        return as_cmz(Mw)
    B = (X_plus - Mw.center) @ K
    if Mw.n_generators == 0:
        # noise-free: the data must already lie in the row space
        if np.max(np.abs(B)) > 1e-8 * max(1.0, np.max(np.abs(X_plus))):
            raise InfeasibleError("noise-free data is not explained by any model in the class")
        return as_cmz(Mw)
    N = ConstrainedMatrixZonotope(Mw.center, Mw.generators, Mw.generators @ K, B, check=False)
    try:
        N.factor_bounds
    except InfeasibleError as exc:
        raise InfeasibleError("no noise sequence in the bound explains the data; "
                              "the noise bound is inconsistent with the recorded data") from exc
    return N


def compute_Nw(D: DataMatrices, Mw: MatrixZonotope) -> ConstrainedMatrixZonotope:
    """Noise matrices in ``Mw`` for which ``X_plus - W`` lies in the row space of the data."""
    return constrain_noise(D.X_plus, Mw, kernel_basis(D.Z_minus))


def compute_Nsigma(D: DataMatrices, Nw: ConstrainedMatrixZonotope) -> ConstrainedMatrixZonotope:
    """``(X_plus - Nw) H`` with the constraints of ``Nw``."""
    H = right_inverse(D.Z_minus)
    return cmz_affine(D.X_plus, as_cmz(Nw), H)


def build_side_info_cmz(Nsigma: ConstrainedMatrixZonotope, info: SideInfo, T: int | None = None
                        ) -> ConstrainedMatrixZonotope:
    """Intersect a model set with ``|Q [A B] - Y| <= R``.

    One extra factor is added per entry of ``R``; it has a zero generator and
    enters only the new constraint rows. All constraint generators are
    zero-padded to a common width ``max(n_a, n + m)``.
    """
    N = as_cmz(Nsigma)
    n, p = N.shape
    ns = info.Q.shape[0]
    if info.Q.shape[1] != n or info.Y.shape[1] != p:
        raise DimensionError(f"side information for {info.Q.shape[1]}x{info.Y.shape[1]} models, "
                             f"model set members are {n}x{p}")
    nc, na = N.B.shape
    if T is None:
        T = na + p
    if T <= 2 * p:
        raise UnsupportedRegimeError(
            f"side information needs T > 2(n+m) = {2 * p} data columns, got T = {T}")
    width = max(na, p)
    g = N.n_generators
    n_extra = ns * p
    A = np.zeros((g + n_extra, nc + ns, width))
    A[:g, :nc, :na] = N.A
    A[:g, nc:, :p] = np.einsum("ij,gjk->gik", info.Q, N.generators)
    for idx in range(n_extra):
        r, c = divmod(idx, p)
        A[g + idx, nc + r, c] = -info.R[r, c]
    B = np.zeros((nc + ns, width))
    B[:nc, :na] = N.B
    B[nc:, :p] = info.Y - info.Q @ N.center
    G = np.concatenate([N.generators, np.zeros((n_extra, n, p))])
    Ns = ConstrainedMatrixZonotope(N.center, G, A, B, check=False)
    try:
        Ns.factor_bounds
    except InfeasibleError as exc:
        raise InfeasibleError("side information contradicts the data-consistent model set") from exc
    return Ns


def measurement_offset_set(Mv: MatrixZonotope, A) -> MatrixZonotope:
    """``Mv - A Mv`` with independent factors, a bound on ``V_plus - A V_minus``."""
    return Mv + (-(np.asarray(A, dtype=float) @ Mv))


# algorithms ----------------------------------------------------------------

def alg1_reach(D, Mw, Zw, X0, U, N, reduce_order=DEFAULT_REDUCE_ORDER) -> ReachSequence:
    M = compute_Msigma(D, Mw)
    return _propagate(M, X0, U, Zw, N, "alg1", reduce_order)


def alg2_reach(D, Mw, Zw, X0, U, N) -> ReachSequence:
    Ns = compute_Nsigma(D, compute_Nw(D, Mw)).prune()
    return _propagate(Ns, X0, U, Zw, N, "alg2")


def alg3_reach(D, Mw, Zw, X0, U, N, info: SideInfo) -> ReachSequence:
    Nsig = compute_Nsigma(D, compute_Nw(D, Mw))
    Ns = build_side_info_cmz(Nsig, info, T=D.T).prune()
    return _propagate(Ns, X0, U, Zw, N, "alg3")


def compute_Msigma_meas(D: DataMatrices, Mo: MatrixZonotope, Mw: MatrixZonotope) -> MatrixZonotope:
    """``(Y_plus - Mo - Mw) H`` from measured data."""
    Dy = D.measured()
    H = right_inverse(Dy.Z_minus)
    return mz_affine(Dy.X_plus, Mw + Mo, H)


def compute_Nsigma_meas(D: DataMatrices, Mo: MatrixZonotope, Mw: MatrixZonotope) -> ConstrainedMatrixZonotope:
    """Constrained version: process-noise generators first, then measurement-offset generators."""
    Dy = D.measured()
    return compute_Nsigma(Dy, compute_Nw(Dy, Mw + Mo))


def prop4_reach(D, Mo, Mw, Zw, X0, U, N, reduce_order=DEFAULT_REDUCE_ORDER) -> ReachSequence:
    M = compute_Msigma_meas(D, Mo, Mw)
    return _propagate(M, X0, U, Zw, N, "prop4", reduce_order)


def prop5_reach(D, Mo, Mw, Zw, X0, U, N) -> ReachSequence:
    Ns = compute_Nsigma_meas(D, Mo, Mw).prune()
    return _propagate(Ns, X0, U, Zw, N, "prop5")


def alg4_model(D: DataMatrices, Zw: Zonotope, Zv: Zonotope, Mw: MatrixZonotope, Mv: MatrixZonotope
               ) -> tuple[np.ndarray, Zonotope]:
    """Least-squares model and residual zonotope ``Z_AV`` from measured data."""
    Dy = D.measured()
    Z = Dy.Z_minus
    H = right_inverse(Z)
    M = (Dy.X_plus - Mv.center - Mw.center) @ H
    resid = Dy.X_plus - M @ Z
    box = Interval(resid.min(axis=1), resid.max(axis=1)).to_zonotope()
    return M, box - Zw - Zv


def alg4_reach(D, Zw, Zv, Mw, Mv, X0, U, N, reduce_order=DEFAULT_REDUCE_ORDER) -> ReachSequence:
    """Heuristic measurement-noise reachability; carries no formal guarantee."""
    M, Zav = alg4_model(D, Zw, Zv, Mw, Mv)
    meta = {"model": M.tolist(), "Z_AV": Zav.to_dict()}
    return _propagate(M, X0, U, Zw, N, "alg4", reduce_order, pre=lambda R: R + Zv, extra=(Zav,),
                      meta=meta, heuristic=True)


def alg4_validation_set(D: DataMatrices, M: np.ndarray, Zav: Zonotope) -> MatrixZonotope:
    """``(M [Y_minus; U_minus] + M_AV) H``, the model set implied by the residual bound."""
    Dy = D.measured()
    H = right_inverse(Dy.Z_minus)
    Mav = mz_from_noise_zonotope(Zav, Dy.T)
    return (Mav + M @ Dy.Z_minus).right_multiply(H)


def noise_matrix_zonotope(Z: Zonotope, D: DataMatrices) -> MatrixZonotope:
    return mz_from_noise_zonotope(Z, D.T)
