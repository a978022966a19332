"""Trajectory simulation, data matrices and the linear algebra the algorithms need."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from ddreach.errors import DimensionError, RankDeficiencyError
from ddreach.sets import Zonotope

RANK_TOL = 1e-8

# stream identifiers for seed splitting
CH_INITIAL, CH_INPUT, CH_PROCESS, CH_MEASUREMENT = 0, 1, 2, 3


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one (trajectory, step, channel) slot."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


@dataclass(frozen=True)
class Trajectory:
    """One recorded run: ``inputs`` (T, m), ``states`` (T+1, n), optional ``measured`` (T+1, n).

    ``process_noise`` and ``measurement_noise`` hold the realized noise when the
    trajectory was simulated; they are unknown for recorded data.
    """

    inputs: np.ndarray
    states: np.ndarray
    measured: np.ndarray | None = None
    process_noise: np.ndarray | None = None
    measurement_noise: np.ndarray | None = None

    def __post_init__(self):
        U = np.asarray(self.inputs, dtype=float)
        X = np.asarray(self.states, dtype=float)
        if U.ndim == 1:
            U = U.reshape(-1, 1)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] != U.shape[0] + 1:
            raise DimensionError(f"{X.shape[0]} states for {U.shape[0]} inputs; need one more state than inputs")
        object.__setattr__(self, "inputs", U)
        object.__setattr__(self, "states", X)
        if self.measured is not None:
            Y = np.asarray(self.measured, dtype=float)
            if Y.ndim == 1:
                Y = Y.reshape(-1, 1)
            if Y.shape != X.shape:
                raise DimensionError(f"measured shape {Y.shape} differs from states {X.shape}")
            object.__setattr__(self, "measured", Y)

    @property
    def length(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class DataMatrices:
    """Column-stacked data; column ``j`` of ``X_plus`` follows column ``j`` of ``X_minus``."""

    X_plus: np.ndarray
    X_minus: np.ndarray
    U_minus: np.ndarray
    Y_plus: np.ndarray | None = None
    Y_minus: np.ndarray | None = None
    W_minus: np.ndarray | None = None
    V_plus: np.ndarray | None = None
    V_minus: np.ndarray | None = None
    lengths: tuple = field(default=())

    @property
    def T(self) -> int:
        return self.X_plus.shape[1]

    @property
    def n(self) -> int:
        return self.X_plus.shape[0]

    @property
    def m(self) -> int:
        return self.U_minus.shape[0]

    @property
    def Z_minus(self) -> np.ndarray:
        """``[X_minus; U_minus]``."""
        return np.vstack([self.X_minus, self.U_minus])

    @property
    def has_measurements(self) -> bool:
        return self.Y_plus is not None

    def measured(self) -> "DataMatrices":
        """Data as seen through the measurement channel (states replaced by measurements)."""
        if self.Y_plus is None:
            raise ValueError("data has no measurement channel")
        return DataMatrices(self.Y_plus, self.Y_minus, self.U_minus, lengths=self.lengths)


@dataclass(frozen=True, eq=False)
class SystemModel:
    """A discrete-time system ``x+ = f(x, u)`` with known structure.

    ``kind`` is ``lti`` (``A``, ``B``), ``polynomial`` (``coefficients`` times
    ``basis.evaluate``) or ``lipschitz`` (a black-box ``fn``).
    """

    kind: str
    n: int
    m: int
    A: np.ndarray | None = None
    B: np.ndarray | None = None
    coefficients: np.ndarray | None = None
    basis: object | None = None
    fn: Callable | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind == "lti":
            A = np.atleast_2d(np.asarray(self.A, dtype=float))
            B = np.asarray(self.B, dtype=float).reshape(self.n, self.m)
            if A.shape != (self.n, self.n):
                raise DimensionError(f"A must be {self.n}x{self.n}, got {A.shape}")
            object.__setattr__(self, "A", A)
            object.__setattr__(self, "B", B)
        elif self.kind == "polynomial":
            C = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
            if self.basis is None or C.shape != (self.n, len(self.basis)):
                raise DimensionError("polynomial coefficients must be n x (basis size)")
            object.__setattr__(self, "coefficients", C)
        elif self.kind == "lipschitz":
            if self.fn is None:
                raise ValueError("lipschitz model needs a callable fn(x, u)")
        else:
            raise ValueError(f"unknown system kind {self.kind!r}")

    @classmethod
    def lti(cls, A, B, name=""):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.asarray(B, dtype=float)
        return cls("lti", A.shape[0], B.size // A.shape[0], A=A, B=B.reshape(A.shape[0], -1), name=name)

    @property
    def AB(self) -> np.ndarray:
        return np.hstack([self.A, self.B])

    def step(self, x, u) -> np.ndarray:
        """Noise-free successor; accepts single vectors or row-stacked batches."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        U = np.atleast_2d(u)
        if X.shape[1] != self.n or U.shape[1] != self.m:
            raise DimensionError(f"step expects x in R^{self.n}, u in R^{self.m}")
        if self.kind == "lti":
            out = X @ self.A.T + U @ self.B.T
        elif self.kind == "polynomial":
            out = self.basis.evaluate(np.hstack([X, U])) @ self.coefficients.T
        else:
            out = np.asarray(self.fn(X, U), dtype=float).reshape(X.shape[0], self.n)
        return out[0] if single else out


def _as_input_list(U, steps):
    if isinstance(U, Zonotope):
        return [U] * steps
    U = list(U)
    if len(U) < steps:
        raise DimensionError(f"{len(U)} input sets for {steps} steps")
    return U


def simulate(model: SystemModel, X0: Zonotope, U, Zw: Zonotope, Zv: Zonotope | None = None,
             K: int = 1, T_i: int | Sequence[int] = 1, seed: int = 0) -> list[Trajectory]:
    """Draw ``K`` noisy trajectories.

    Initial states, inputs and noises are uniform in the factor boxes of their
    zonotopes. Every (trajectory, step, channel) draw uses its own substream, so
    the result does not depend on generation order.
    """
    lengths = [int(T_i)] * K if np.isscalar(T_i) else [int(t) for t in T_i]
    if len(lengths) != K:
        raise DimensionError(f"{len(lengths)} trajectory lengths for K={K}")
    if X0.dim != model.n or Zw.dim != model.n or (Zv is not None and Zv.dim != model.n):
        raise DimensionError("initial, noise and state dimensions differ")
    U_sets = _as_input_list(U, max(lengths) if lengths else 0)
    if any(u.dim != model.m for u in U_sets):
        raise DimensionError("input set dimension differs from model input dimension")
    out = []
    for i, Ti in enumerate(lengths):
        x = X0.sample_point(substream(seed, i, 0, CH_INITIAL))
        xs, us, ws = [x], [], []
        for k in range(Ti):
            u = U_sets[k].sample_point(substream(seed, i, k, CH_INPUT))
            w = Zw.sample_point(substream(seed, i, k, CH_PROCESS))
            x = model.step(x, u) + w
            xs.append(x)
            us.append(u)
            ws.append(w)
        states = np.array(xs).reshape(Ti + 1, model.n)
        meas = vs = None
        if Zv is not None:
            vs = np.array([Zv.sample_point(substream(seed, i, k, CH_MEASUREMENT)) for k in range(Ti + 1)])
            meas = states + vs
        out.append(Trajectory(np.array(us).reshape(Ti, model.m), states, meas,
                              np.array(ws).reshape(Ti, model.n), vs))
    return out


def assemble(trajectories: Sequence[Trajectory]) -> DataMatrices:
    """Stack trajectories into ``X_plus``, ``X_minus``, ``U_minus`` (and measured/noise blocks)."""
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("no trajectories")
    Xp = np.hstack([t.states[1:].T for t in trajectories])
    Xm = np.hstack([t.states[:-1].T for t in trajectories])
    Um = np.hstack([t.inputs.T for t in trajectories])
    kw = {}
    if all(t.measured is not None for t in trajectories):
        kw["Y_plus"] = np.hstack([t.measured[1:].T for t in trajectories])
        kw["Y_minus"] = np.hstack([t.measured[:-1].T for t in trajectories])
    if all(t.process_noise is not None for t in trajectories):
        kw["W_minus"] = np.hstack([t.process_noise.T for t in trajectories])
    if all(t.measurement_noise is not None for t in trajectories):
        kw["V_plus"] = np.hstack([t.measurement_noise[1:].T for t in trajectories])
        kw["V_minus"] = np.hstack([t.measurement_noise[:-1].T for t in trajectories])
    return DataMatrices(Xp, Xm, Um, lengths=tuple(t.length for t in trajectories), **kw)


def disassemble(D: DataMatrices) -> list[Trajectory]:
    """Inverse of ``assemble`` for the state/input/measurement columns."""
    out, start = [], 0
    for Ti in D.lengths:
        sl = slice(start, start + Ti)
        states = np.hstack([D.X_minus[:, sl], D.X_plus[:, start + Ti - 1:start + Ti]]).T
        meas = None
        if D.Y_plus is not None:
            meas = np.hstack([D.Y_minus[:, sl], D.Y_plus[:, start + Ti - 1:start + Ti]]).T
        out.append(Trajectory(D.U_minus[:, sl].T, states, meas))
        start += Ti
    return out


def _svd_rank(M, full=True):
    U, s, Vt = np.linalg.svd(M, full_matrices=full)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return U, s, Vt, rank


def right_inverse(M) -> np.ndarray:
    """Pseudoinverse ``H`` with ``M H = I``; requires full row rank."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows = M.shape[0]
    if M.shape[1] < rows:
        raise RankDeficiencyError(
            f"data matrix is {rows}x{M.shape[1]}: fewer columns than rows, so no right inverse exists "
            "(collect more data)", rank=None, rows=rows)
    U, s, Vt, rank = _svd_rank(M, full=False)
    if rank < rows:
        deficient = U[:, rank:]
        raise RankDeficiencyError(
            f"data matrix has rank {rank} < {rows} rows; the row space misses the directions "
            f"{np.round(deficient.T, 6).tolist()} (inputs not persistently exciting)",
            rank=rank, rows=rows)
    return (Vt[:rows].T / s[:rows]) @ U.T


def kernel_basis(M) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return np.eye(M.shape[1])
    _, _, Vt, rank = _svd_rank(M)
    return Vt[rank:].T.copy()


def covering_radius(D: DataMatrices | np.ndarray) -> float:
    """Largest nearest-neighbour distance among the data points ``[X_minus; U_minus]``."""
    Z = (D.Z_minus if isinstance(D, DataMatrices) else np.asarray(D, dtype=float)).T
    if Z.shape[0] < 2:
        return 0.0
    best = 0.0
    for start in range(0, Z.shape[0], 512):
        block = cdist(Z[start:start + 512], Z)
        idx = np.arange(block.shape[0])
        block[idx, start + idx] = np.inf
        best = max(best, float(block.min(axis=1).max()))
    return best


def lipschitz_estimate(D: DataMatrices, values: np.ndarray | None = None) -> float:
    """Largest difference quotient ``|f(z_i) - f(z_j)| / |z_i - z_j|`` over data pairs.

    ``f(z_i)`` is taken as column ``i`` of ``X_plus`` unless ``values`` is given.
    Pairs closer than 1e-12 are skipped.
    """
    Z = D.Z_minus.T
    F = (D.X_plus if values is None else np.asarray(values, dtype=float)).T
    best, found = 0.0, False
    for start in range(0, Z.shape[0], 512):
        dz = cdist(Z[start:start + 512], Z)
        df = cdist(F[start:start + 512], F)
        mask = dz >= 1e-12
        if np.any(mask):
            found = True
            best = max(best, float((df[mask] / dz[mask]).max()))
    if not found:
        raise ValueError("Lipschitz estimate needs at least two distinct data points")
    return best


# CSV ----------------------------------------------------------------------

def write_csv(path, trajectories: Sequence[Trajectory]) -> None:
    """One row per time step: ``traj_id, k, u..., x..., y...`` (inputs empty on the last row)."""
    trajectories = list(trajectories)
    n = trajectories[0].states.shape[1]
    m = trajectories[0].inputs.shape[1]
    has_y = all(t.measured is not None for t in trajectories)
    header = ["traj_id", "k"] + [f"u{i}" for i in range(m)] + [f"x{i}" for i in range(n)]
    if has_y:
        header += [f"y{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for tid, t in enumerate(trajectories):
            for k in range(t.length + 1):
                u = [repr(float(v)) for v in t.inputs[k]] if k < t.length else [""] * m
                row = [tid, k] + u + [repr(float(v)) for v in t.states[k]]
                if has_y:
                    row += [repr(float(v)) for v in t.measured[k]]
                w.writerow(row)


def read_csv(path) -> list[Trajectory]:
    """Load trajectories written by ``write_csv`` or recorded externally in the same schema."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    ucols = [i for i, h in enumerate(header) if h.startswith("u")]
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    ycols = [i for i, h in enumerate(header) if h.startswith("y")]
    if header[:2] != ["traj_id", "k"] or not xcols:
        raise ValueError(f"{path}: header must start with traj_id,k and contain x columns")
    groups: dict[str, list] = {}
    for line, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        groups.setdefault(r[0], []).append((int(r[1]), r, line))
    out = []
    for tid, items in groups.items():
        items.sort(key=lambda t: t[0])
        ks = [k for k, _, _ in items]
        if ks != list(range(len(ks))):
            raise ValueError(f"{path}: trajectory {tid} has non-consecutive steps {ks}")
        states = np.array([[float(r[i]) for i in xcols] for _, r, _ in items])
        inputs = np.array([[float(r[i]) for i in ucols] for _, r, _ in items[:-1]]).reshape(len(items) - 1, len(ucols))
        meas = np.array([[float(r[i]) for i in ycols] for _, r, _ in items]) if ycols else None
        out.append(Trajectory(inputs, states, meas))
    return out
