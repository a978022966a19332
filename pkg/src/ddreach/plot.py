"""2-D projections of stored reachable sets as SVG files.

Zonotopes are drawn exactly (generator-angle sweep of the projection).
Constrained zonotopes are drawn as the polygon cut out by support half-planes
along evenly spaced directions, which contains the true projection; the legend
marks them as outer approximations.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from ddreach.sets import ConstrainedZonotope, Zonotope, set_from_dict

log = logging.getLogger(__name__)

SUPPORT_DIRECTIONS = 32


def zonotope_polygon(Z: Zonotope, dims=(0, 1)) -> np.ndarray:
    P = np.zeros((2, Z.dim))
    P[0, dims[0]] = P[1, dims[1]] = 1.0
    return Z.linear_map(P).vertices_2d()


def halfplane_polygon(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Vertices of ``{p : normals @ p <= offsets}`` for normals sorted by angle around the circle."""
    verts = []
    k = len(normals)
    for i in range(k):
        a, b = normals[i], normals[(i + 1) % k]
        M = np.array([a, b])
        verts.append(np.linalg.solve(M, [offsets[i], offsets[(i + 1) % k]]))
    return np.array(verts)


def support_polygon(S, dims=(0, 1), count: int = SUPPORT_DIRECTIONS) -> np.ndarray:
    """Outer polygon of the projection from ``count`` support evaluations."""
    ang = 2 * np.pi * np.arange(count) / count
    normals = np.column_stack([np.cos(ang), np.sin(ang)])
    D = np.zeros((count, S.dim))
    D[:, dims[0]], D[:, dims[1]] = normals[:, 0], normals[:, 1]
    return halfplane_polygon(normals, np.asarray(S.support(D), dtype=float))


def polygon(S, dims=(0, 1)) -> tuple[np.ndarray, bool]:
    """Returns vertices and whether the polygon is an outer approximation."""
    if isinstance(S, ConstrainedZonotope):
        return support_polygon(S, dims), True
    return zonotope_polygon(S, dims), False


def polygon_area(V: np.ndarray) -> float:
    x, y = V[:, 0], V[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def default_pairs(n: int) -> list[tuple[int, int]]:
    """Consecutive state pairs covering every coordinate."""
    if n < 2:
        return []
    pairs = [(i, i + 1) for i in range(0, n - 1, 2)]
    if n % 2:
        pairs.append((n - 2, n - 1))
    return pairs


def plot_run(run_dir, pairs=None) -> list[Path]:
    """Write ``plot_x<i>_x<j>.svg`` for each projection pair; returns the written paths."""
    run_dir = Path(run_dir)
    files = sorted((run_dir / "sets").glob("*.json")) if (run_dir / "sets").is_dir() else []
    if not files:
        log.warning("no set files under %s; nothing to plot", run_dir)
        return []
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    # fixed salt keeps generated element ids, and so the files, reproducible
    plt.rcParams["svg.hashsalt"] = "ddreach"

    sequences = {}
    for f in files:
        doc = json.loads(f.read_text())
        sequences[doc["method"]] = [set_from_dict(s) for s in doc["sets"]]
    n = next(iter(sequences.values()))[0].dim
    written = []
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for dims in pairs or default_pairs(n):
        shapes = []
        for i, (method, seq) in enumerate(sequences.items()):
            for k, S in enumerate(seq):
                V, outer = polygon(S, dims)
                shapes.append((polygon_area(V), method, k, V, outer, colors[i % len(colors)]))
        # largest first so nested sets stay visible
        shapes.sort(key=lambda s: (-s[0], s[1], s[2]))
        fig, ax = plt.subplots(figsize=(6, 5))
        labelled = set()
        for _, method, k, V, outer, color in shapes:
            label = None
            if method not in labelled:
                label = f"{method} (outer approx.)" if outer else method
                labelled.add(method)
            closed = np.vstack([V, V[:1]])
            ax.fill(closed[:, 0], closed[:, 1], color=color, alpha=0.25, label=label)
            ax.plot(closed[:, 0], closed[:, 1], color=color, lw=0.8)
        ax.set_xlabel(f"x{dims[0] + 1}")
        ax.set_ylabel(f"x{dims[1] + 1}")
        ax.legend(loc="best", fontsize=8)
        path = run_dir / f"plot_x{dims[0] + 1}_x{dims[1] + 1}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
