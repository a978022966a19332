"""Run a validated experiment config and write its outputs.

Output directory layout::

    config.json        the config as run (CLI overrides applied)
    data.csv           the trajectories used for identification
    sets/<method>.json reachable sets and interval hulls per step
    report.json        Monte Carlo containment, model-set membership, nesting
    timing.json        per-step wall-clock times (only with timing enabled)

Everything except ``timing.json`` is a pure function of the config and seed.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path

import numpy as np

from ddreach import systems
from ddreach.config import ExperimentConfig, interval_from
from ddreach.data import SystemModel, assemble, disassemble, read_csv, simulate, write_csv
from ddreach.matrix_sets import cmz_contains_matrix, mz_from_noise_zonotope
from ddreach.oracle import monte_carlo_check, nesting_report
from ddreach.reach_lipschitz import LipschitzConfig, alg6_reach
from ddreach.reach_lti import (
    SideInfo,
    alg1_reach,
    alg2_reach,
    alg3_reach,
    alg4_model,
    alg4_reach,
    alg4_validation_set,
    build_side_info_cmz,
    compute_Msigma,
    compute_Msigma_meas,
    compute_Nsigma,
    compute_Nsigma_meas,
    compute_Nw,
    measurement_offset_set,
    prop4_reach,
    prop5_reach,
)
from ddreach.reach_poly import (
    MonomialBasis,
    alg5_constrained_reach,
    alg5_reach,
    alg5_sideinfo_reach,
    compute_Msigma_p,
    compute_Nsigma_p,
)

NESTED_PAIRS = (("alg2", "alg1"), ("alg3", "alg2"), ("prop5", "prop4"), ("alg5c", "alg5"), ("alg5s", "alg5c"))


def build_model(doc: dict) -> SystemModel:
    kind = doc["kind"]
    if kind == "lti":
        return SystemModel.lti(doc["A"], doc["B"], name=doc.get("name", "lti"))
    if kind == "polynomial":
        n, m = doc["n"], doc["m"]
        degree = max(sum(t["exponent"]) for t in doc["terms"]) if doc["terms"] else 1
        basis = MonomialBasis.from_degree(n + m, max(degree, 1))
        C = np.zeros((n, len(basis)))
        for t in doc["terms"]:
            C[t["row"], basis.index(t["exponent"])] += float(t["coefficient"])
        return SystemModel("polynomial", n, m, coefficients=C, basis=basis, name=doc.get("name", "polynomial"))
    return getattr(systems, doc["name"])()


def build_basis(doc: dict, n_vars: int) -> MonomialBasis:
    if "degree" in doc:
        return MonomialBasis.from_degree(n_vars, doc["degree"])
    return MonomialBasis(tuple(tuple(int(a) for a in e) for e in doc["exponents"]))


def _coefficients_in(model: SystemModel, basis: MonomialBasis):
    """True coefficient matrix expressed in ``basis``; None when the basis misses a monomial."""
    if model.kind != "polynomial":
        return None
    C = np.zeros((model.n, len(basis)))
    for j, alpha in enumerate(model.basis.exponents):
        col = model.coefficients[:, j]
        if not np.any(col):
            continue
        if alpha not in basis.exponents:
            return None
        C[:, basis.index(alpha)] = col
    return C


def load_data(cfg: ExperimentConfig, model: SystemModel, seed: int):
    """Returns ``(DataMatrices, trajectories)``."""
    d = cfg.data
    if "file" in d:
        trajs = read_csv(d["file"])
        return assemble(trajs), trajs
    if "grid" in d:
        region = interval_from(d["grid"], model.n + model.m)
        D = systems.grid_data(model, region, d["grid"]["spacing"], cfg.Zw, seed)
        return D, disassemble(D)
    trajs = simulate(model, cfg.X0, cfg.U, cfg.Zw, cfg.Zv, K=d["K"], T_i=d["T_i"], seed=seed)
    return assemble(trajs), trajs


def _lipschitz_config(cfg: ExperimentConfig, model: SystemModel) -> LipschitzConfig:
    lip = cfg.lipschitz or {}
    delta = lip.get("delta", 0.0)
    if delta == "grid":
        delta = systems.grid_covering_radius(cfg.data["grid"]["spacing"], model.n + model.m)
    return LipschitzConfig(float(lip.get("L_star", 0.0)), float(delta), bool(lip.get("estimate_from_data", False)),
                           bool(lip.get("relinearize_each_step", False)), bool(lip.get("shift_correction", False)),
                           tuple(tuple(p) for p in lip.get("per_step", ())))


def run_method(method, cfg, model, D, reduce_order):
    """Returns ``(ReachSequence, membership)``; membership is None when it does not apply."""
    X0, U, Zw, N = cfg.X0, cfg.U, cfg.Zw, cfg.horizon
    Mw = mz_from_noise_zonotope(Zw, D.T)
    AB = model.AB if model.kind == "lti" else None
    info = SideInfo(**{k: cfg.side_info[k] for k in "QYR"}) if cfg.side_info else None
    if method == "alg1":
        seq = alg1_reach(D, Mw, Zw, X0, U, N, reduce_order)
        member = compute_Msigma(D, Mw).contains(AB) if AB is not None else None
    elif method == "alg2":
        seq = alg2_reach(D, Mw, Zw, X0, U, N)
        member = cmz_contains_matrix(compute_Nsigma(D, compute_Nw(D, Mw)), AB) if AB is not None else None
    elif method == "alg3":
        seq = alg3_reach(D, Mw, Zw, X0, U, N, info)
        Ns = build_side_info_cmz(compute_Nsigma(D, compute_Nw(D, Mw)), info, T=D.T)
        member = cmz_contains_matrix(Ns, AB) if AB is not None else None
    elif method in ("prop4", "prop5", "alg4"):
        Mv = mz_from_noise_zonotope(cfg.Zv, D.T)
        if method == "alg4":
            seq = alg4_reach(D, Zw, cfg.Zv, Mw, Mv, X0, U, N, reduce_order)
            M, Zav = alg4_model(D, Zw, cfg.Zv, Mw, Mv)
            member = alg4_validation_set(D, M, Zav).contains(AB)
        else:
            Mo = measurement_offset_set(Mv, model.A)
            if method == "prop4":
                seq = prop4_reach(D, Mo, Mw, Zw, X0, U, N, reduce_order)
                member = compute_Msigma_meas(D, Mo, Mw).contains(AB)
            else:
                seq = prop5_reach(D, Mo, Mw, Zw, X0, U, N)
                member = cmz_contains_matrix(compute_Nsigma_meas(D, Mo, Mw), AB)
    elif method in ("alg5", "alg5c", "alg5s"):
        basis = build_basis(cfg.basis, model.n + model.m)
        C = _coefficients_in(model, basis)
        if method == "alg5":
            seq = alg5_reach(D, Mw, Zw, basis, X0, U, N, reduce_order)
            member = compute_Msigma_p(D, Mw, basis).contains(C) if C is not None else None
        elif method == "alg5c":
            seq = alg5_constrained_reach(D, Mw, Zw, basis, X0, U, N)
            member = cmz_contains_matrix(compute_Nsigma_p(D, Mw, basis), C) if C is not None else None
        else:
            seq = alg5_sideinfo_reach(D, Mw, Zw, basis, X0, U, N, info)
            Ns = build_side_info_cmz(compute_Nsigma_p(D, Mw, basis), info, T=D.T)
            member = cmz_contains_matrix(Ns, C) if C is not None else None
    elif method == "alg6":
        seq = alg6_reach(D, Mw, Zw, _lipschitz_config(cfg, model), X0, U, N, reduce_order)
        member = None
    else:  # pragma: no cover - validated earlier
        raise ValueError(f"unknown method {method}")
    return seq, (None if member is None else bool(member))


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=_json_default) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(cfg: ExperimentConfig, seed: int | None = None, samples: int | None = None,
                   reduce_order: int | None = None, output: str | None = None, timing: bool = False,
                   log=print) -> dict:
    """Run every configured method, write the output directory and return the report."""
    seed = int(cfg.data.get("seed", 0) if seed is None else seed)
    samples = cfg.samples if samples is None else samples
    reduce_order = cfg.reduce_order if reduce_order is None else reduce_order
    out = Path(output or cfg.output)
    model = build_model(cfg.system)
    D, trajs = load_data(cfg, model, seed)

    as_run = dict(cfg.raw)
    as_run.update(samples=samples, reduce_order=reduce_order)
    as_run.pop("output", None)
    as_run["data"] = dict(cfg.data, seed=seed)
    write_atomic(out / "config.json", dumps(as_run))
    tmp_csv = out / ".data.csv.tmp"
    out.mkdir(parents=True, exist_ok=True)
    write_csv(tmp_csv, trajs)
    os.replace(tmp_csv, out / "data.csv")

    report = {"name": cfg.name, "seed": seed, "samples": samples, "data_columns": D.T, "methods": {},
              "nesting": {}}
    sequences, timings = {}, {}
    for method in cfg.methods:
        t0 = time.perf_counter()
        seq, member = run_method(method, cfg, model, D, reduce_order)
        elapsed = time.perf_counter() - t0
        sequences[method] = seq
        write_atomic(out / "sets" / f"{method}.json", dumps(seq.to_dict(timing=False)))
        entry = {"heuristic": seq.heuristic, "model_in_set": member}
        if samples > 0:
            rep = monte_carlo_check(model, cfg.X0, cfg.U, cfg.Zw, seq, samples, seed)
            entry["containment"] = rep.to_dict()
            frac = f"{rep.fraction:.4f}"
        else:
            frac = "skipped"
        report["methods"][method] = entry
        timings[method] = {"total": elapsed, "steps": list(seq.step_times)}
        log(f"{method}: containment {frac}, model in set: {member}, {elapsed:.2f} s")
    for inner, outer in NESTED_PAIRS:
        if inner in sequences and outer in sequences:
            excess = nesting_report(sequences[inner], sequences[outer], 100, seed)
            report["nesting"][f"{inner}<={outer}"] = {"max_support_excess": excess,
                                                      "holds": bool(max(excess) <= 1e-6)}
    write_atomic(out / "report.json", dumps(report))
    if timing:
        write_atomic(out / "timing.json", dumps(timings))
    return report
