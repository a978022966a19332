"""Experiment configuration: JSON schema, validation and object construction.

A config is a JSON object. Sets are ``{"center": [...], "generators": [[...]]}``
with generators as columns of a row-major matrix (``n`` rows). Fields:

``name``            experiment label
``system``          ``{"kind": "lti", "A": .., "B": ..}``,
                    ``{"kind": "polynomial", "n": .., "m": .., "degree": ..,
                    "terms": [{"row": i, "exponent": [...], "coefficient": c}]}``
                    or ``{"kind": "builtin", "name": ..}``
``X0``, ``U``, ``Zw``  initial, input and process-noise zonotopes
``Zv``              measurement-noise zonotope (measurement methods only)
``data``            ``{"K": .., "T_i": .., "seed": ..}`` for simulated trajectories,
                    ``{"grid": {"lower", "upper", "spacing"}, "seed": ..}`` for gridded
                    one-step data, or ``{"file": path}`` for a CSV recording
``methods``         subset of ``METHODS``
``horizon``         number of steps ``N``
``reduce_order``    zonotope order limit for unconstrained methods (0 disables)
``side_info``       ``{"Q", "Y", "R"}`` for ``alg3`` / ``alg5s``
``basis``           ``{"degree": d}`` or ``{"exponents": [[...]]}`` for polynomial methods
``lipschitz``       ``{"L_star", "delta", "estimate_from_data", "relinearize_each_step",
                    "shift_correction", "per_step"}``; ``"delta": "grid"`` uses the grid's
                    covering radius
``samples``         Monte Carlo samples per step
``output``          output directory
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ddreach.errors import ConfigError
from ddreach.sets import Interval, Zonotope

LTI_METHODS = ("alg1", "alg2", "alg3")
MEAS_METHODS = ("prop4", "prop5", "alg4")
POLY_METHODS = ("alg5", "alg5c", "alg5s")
LIP_METHODS = ("alg6",)
METHODS = LTI_METHODS + MEAS_METHODS + POLY_METHODS + LIP_METHODS
BUILTIN_SYSTEMS = ("five_state_lti", "quadratic_two_state", "pendulum_like")

_KNOWN = {"name", "system", "X0", "U", "Zw", "Zv", "data", "methods", "horizon", "reduce_order",
          "side_info", "basis", "lipschitz", "samples", "output", "description"}


@dataclass
class ExperimentConfig:
    name: str
    system: dict
    X0: Zonotope
    U: Zonotope
    Zw: Zonotope
    Zv: Zonotope | None
    data: dict
    methods: list
    horizon: int
    reduce_order: int = 20
    side_info: dict | None = None
    basis: dict | None = None
    lipschitz: dict | None = None
    samples: int = 1000
    output: str = "runs"
    raw: dict = field(default_factory=dict)


def bundled_configs() -> list[str]:
    root = resources.files("ddreach") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load(source: str) -> dict:
    """Read a config from a path, or a bundled config by name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    else:
        candidate = resources.files("ddreach") / "configs" / f"{source}.json"
        if not candidate.is_file():
            raise ConfigError(f"config {source!r} is neither a file nor a bundled config "
                              f"(bundled: {', '.join(bundled_configs())})")
        text = candidate.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {source!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _matrix(doc, path, shape=None) -> np.ndarray:
    try:
        M = np.array(doc, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}': expected a numeric matrix") from exc
    if M.ndim == 1:
        M = M.reshape(1, -1) if shape is None or shape[0] == 1 else M.reshape(-1, 1)
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        raise ConfigError(f"field '{path}': expected a finite 2-D matrix")
    if shape is not None:
        for want, got, axis in zip(shape, M.shape, ("rows", "columns")):
            if want is not None and want != got:
                raise ConfigError(f"field '{path}': expected {want} {axis}, got {got}")
    return M


def _vector(doc, path, size=None) -> np.ndarray:
    try:
        v = np.array(doc, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{path}': expected a numeric vector") from exc
    if not np.all(np.isfinite(v)):
        raise ConfigError(f"field '{path}': entries must be finite")
    if size is not None and v.size != size:
        raise ConfigError(f"field '{path}': expected length {size}, got {v.size}")
    return v


def _zonotope(doc, path, dim) -> Zonotope:
    if not isinstance(doc, dict) or "center" not in doc:
        raise ConfigError(f"field '{path}': expected an object with 'center' and 'generators'")
    c = _vector(doc["center"], f"{path}.center", dim)
    G = doc.get("generators", [])
    G = np.zeros((c.size, 0)) if len(G) == 0 else _matrix(G, f"{path}.generators", (c.size, None))
    return Zonotope(c, G)


def _int(doc, path, minimum=0) -> int:
    if isinstance(doc, bool) or not isinstance(doc, int) or doc < minimum:
        raise ConfigError(f"field '{path}': expected an integer >= {minimum}")
    return doc


def _require(doc, key, path=None):
    if key not in doc:
        raise ConfigError(f"missing field '{path or key}'")
    return doc[key]


def _system_dims(sys_doc) -> tuple[int, int]:
    if not isinstance(sys_doc, dict):
        raise ConfigError("field 'system': expected an object")
    kind = _require(sys_doc, "kind", "system.kind")
    if kind == "lti":
        A = _matrix(_require(sys_doc, "A", "system.A"), "system.A")
        if A.shape[0] != A.shape[1]:
            raise ConfigError(f"field 'system.A': must be square, got {A.shape}")
        B = _matrix(_require(sys_doc, "B", "system.B"), "system.B", (A.shape[0], None))
        return A.shape[0], B.shape[1]
    if kind == "polynomial":
        n = _int(_require(sys_doc, "n", "system.n"), "system.n", 1)
        m = _int(_require(sys_doc, "m", "system.m"), "system.m", 1)
        for i, t in enumerate(_require(sys_doc, "terms", "system.terms")):
            p = f"system.terms[{i}]"
            if not isinstance(t, dict):
                raise ConfigError(f"field '{p}': expected an object")
            row = _int(_require(t, "row", f"{p}.row"), f"{p}.row")
            if row >= n:
                raise ConfigError(f"field '{p}.row': {row} out of range for n = {n}")
            e = _vector(_require(t, "exponent", f"{p}.exponent"), f"{p}.exponent", n + m)
            if np.any(e < 0) or np.any(e != np.round(e)):
                raise ConfigError(f"field '{p}.exponent': entries must be non-negative integers")
            _vector([_require(t, "coefficient", f"{p}.coefficient")], f"{p}.coefficient")
        return n, m
    if kind == "builtin":
        name = _require(sys_doc, "name", "system.name")
        if name not in BUILTIN_SYSTEMS:
            raise ConfigError(f"field 'system.name': unknown builtin {name!r} (known: {', '.join(BUILTIN_SYSTEMS)})")
        return {"five_state_lti": (5, 1), "quadratic_two_state": (2, 2), "pendulum_like": (2, 1)}[name]
    raise ConfigError(f"field 'system.kind': unknown kind {kind!r} (lti, polynomial, builtin)")


def validate(doc: dict) -> ExperimentConfig:
    """Check field presence, types and dimensional consistency; raise ConfigError naming the field."""
    unknown = sorted(set(doc) - _KNOWN)
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
    n, m = _system_dims(_require(doc, "system"))
    X0 = _zonotope(_require(doc, "X0"), "X0", n)
    U = _zonotope(_require(doc, "U"), "U", m)
    Zw = _zonotope(_require(doc, "Zw"), "Zw", n)
    Zv = _zonotope(doc["Zv"], "Zv", n) if doc.get("Zv") is not None else None
    methods = _require(doc, "methods")
    if not isinstance(methods, list) or not methods:
        raise ConfigError("field 'methods': expected a non-empty list")
    for i, meth in enumerate(methods):
        if meth not in METHODS:
            raise ConfigError(f"field 'methods[{i}]': unknown method {meth!r} (known: {', '.join(METHODS)})")
    if len(set(methods)) != len(methods):
        raise ConfigError("field 'methods': duplicate entries")
    horizon = _int(_require(doc, "horizon"), "horizon", 1)
    data = _require(doc, "data")
    if not isinstance(data, dict):
        raise ConfigError("field 'data': expected an object")
    if "file" in data:
        if not isinstance(data["file"], str):
            raise ConfigError("field 'data.file': expected a path string")
    elif "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict):
            raise ConfigError("field 'data.grid': expected an object")
        lo = _vector(_require(g, "lower", "data.grid.lower"), "data.grid.lower", n + m)
        hi = _vector(_require(g, "upper", "data.grid.upper"), "data.grid.upper", n + m)
        if np.any(hi < lo):
            raise ConfigError("field 'data.grid.upper': must be >= lower")
        h = _vector(_require(g, "spacing", "data.grid.spacing"), "data.grid.spacing")
        if h.size not in (1, n + m) or np.any(h <= 0):
            raise ConfigError(f"field 'data.grid.spacing': expected 1 or {n + m} positive values")
    else:
        _int(_require(data, "K", "data.K"), "data.K", 1)
        T_i = _require(data, "T_i", "data.T_i")
        if isinstance(T_i, list):
            if len(T_i) != data["K"]:
                raise ConfigError(f"field 'data.T_i': {len(T_i)} lengths for K = {data['K']}")
            for i, t in enumerate(T_i):
                _int(t, f"data.T_i[{i}]", 1)
        else:
            _int(T_i, "data.T_i", 1)
    if "seed" in data:
        _int(data["seed"], "data.seed")
    if Zv is None and any(meth in MEAS_METHODS for meth in methods):
        raise ConfigError("missing field 'Zv' (required by measurement-noise methods)")
    kind = doc["system"]["kind"]
    if any(meth in MEAS_METHODS for meth in methods) and kind != "lti" and doc["system"].get("name") != "five_state_lti":
        raise ConfigError("field 'methods': measurement-noise methods need a linear system")
    side = doc.get("side_info")
    if any(meth in ("alg3", "alg5s") for meth in methods):
        if side is None:
            raise ConfigError("missing field 'side_info' (required by alg3/alg5s)")
    if side is not None:
        Q = _matrix(_require(side, "Q", "side_info.Q"), "side_info.Q", (None, n))
        cols = n + m if not any(meth.startswith("alg5") for meth in methods) else None
        Y = _matrix(_require(side, "Y", "side_info.Y"), "side_info.Y", (Q.shape[0], cols))
        R = _matrix(_require(side, "R", "side_info.R"), "side_info.R", Y.shape)
        if np.any(R < 0):
            raise ConfigError("field 'side_info.R': entries must be non-negative")
    basis = doc.get("basis")
    if any(meth in POLY_METHODS for meth in methods):
        if basis is None:
            raise ConfigError("missing field 'basis' (required by polynomial methods)")
        if "degree" in basis:
            _int(basis["degree"], "basis.degree", 1)
        elif "exponents" in basis:
            _matrix(basis["exponents"], "basis.exponents", (None, n + m))
        else:
            raise ConfigError("field 'basis': expected 'degree' or 'exponents'")
    lip = doc.get("lipschitz")
    if "alg6" in methods:
        if lip is None:
            raise ConfigError("missing field 'lipschitz' (required by alg6)")
        for key in ("L_star", "delta"):
            val = lip.get(key, 0.0)
            if key == "delta" and val == "grid":
                if "grid" not in data:
                    raise ConfigError("field 'lipschitz.delta': 'grid' needs gridded data")
                continue
            if isinstance(val, bool) or not isinstance(val, (int, float)) or val < 0:
                raise ConfigError(f"field 'lipschitz.{key}': expected a non-negative number")
    reduce_order = _int(doc.get("reduce_order", 20), "reduce_order")
    samples = _int(doc.get("samples", 1000), "samples")
    name = doc.get("name", "experiment")
    if not isinstance(name, str):
        raise ConfigError("field 'name': expected a string")
    output = doc.get("output", f"runs/{name}")
    return ExperimentConfig(name, doc["system"], X0, U, Zw, Zv, data, list(methods), horizon,
                            reduce_order, side, basis, lip, samples, output, doc)


def interval_from(doc, dim) -> Interval:
    return Interval(_vector(doc["lower"], "lower", dim), _vector(doc["upper"], "upper", dim))
