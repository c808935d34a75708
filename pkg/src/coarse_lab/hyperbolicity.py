"""Thin-triangle constants and nearest-point retraction onto paths."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .metric_core import Graph, Path, check_path, concat, first_geodesic


@dataclass(frozen=True)
class ThinnessReport:
    delta: int
    # (x, y, z), then geodesics [x,z], [x,y], [y,z]; the side [x,z] holds the far point
    triangle: tuple[int, int, int] | None = None
    sides: tuple[Path, Path, Path] | None = None
    far_point: int | None = None
    lower_bound: bool = False

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "triangle": list(self.triangle) if self.triangle else None,
            "sides": [list(s) for s in self.sides] if self.sides else None,
            "far_point": self.far_point,
            "lower_bound": self.lower_bound,
        }


def _maximin_table(g: Graph, x: int, y: int) -> dict[int, np.ndarray]:
    """For each w in the interval I(x, y), a vector over v of
    max over geodesics [w, y] of min over their vertices of d(v, .)."""
    D = g.dist
    total = D[x, y]
    layer = sorted(
        (w for w in range(g.n) if D[x, w] + D[w, y] == total),
        key=lambda w: -D[x, w],
    )
    best: dict[int, np.ndarray] = {}
    for w in layer:
        if w == y:
            best[w] = D[w].copy()
            continue
        nxt = [best[s] for s in g.adj[w] if s in best and D[s, y] == D[w, y] - 1]
        best[w] = np.minimum(D[w], np.max(nxt, axis=0))
    return best


def _worst_geodesic(g: Graph, x: int, y: int, v: int, best: dict[int, np.ndarray]) -> Path:
    """Geodesic from x to y staying as far from v as possible (the maximin choice)."""
    D = g.dist
    path = [x]
    target = best[x][v]
    while path[-1] != y:
        w = path[-1]
        path.append(next(
            s for s in g.adj[w]
            if s in best and D[s, y] == D[w, y] - 1 and best[s][v] >= target
        ))
    return tuple(path)


def far_from_geodesics(g: Graph) -> np.ndarray:
    """``F[x, y, v]`` = max over geodesics [x, y] of d(v, [x, y])."""
    F = np.zeros((g.n, g.n, g.n), dtype=np.int64)
    for x in range(g.n):
        for y in range(x, g.n):
            F[x, y] = F[y, x] = _maximin_table(g, x, y)[x]
    return F


def thin_triangle_delta(g: Graph, geodesic_cap: int | None = None) -> ThinnessReport:
    """Least delta such that every geodesic triangle (all choices of sides,
    degenerate ones included) is delta-thin.

    A point v on a side [x, z] is at distance
    ``min(max_[x,y] d(v, [x,y]), max_[y,z] d(v, [y,z]))`` from the worst
    choice of the other two sides, since those choices are independent.
    The inner maxima over geodesics come from a bottleneck recursion on the
    geodesic interval, so every choice is covered without enumerating
    paths.  ``geodesic_cap`` is accepted for interface compatibility; the
    result is always exact.
    """
    D = g.dist
    F = far_from_geodesics(g)
    delta, arg = 0, None
    for x in range(g.n):
        for z in range(x, g.n):
            on = np.flatnonzero(D[x] + D[z] == D[x, z])
            # vals[v_idx, y] = min(F[x, y, v], F[y, z, v])
            vals = np.minimum(F[x][:, on].T, F[:, z][:, on].T)
            m = int(vals.max())
            if m > delta:
                vi, y = np.unravel_index(int(vals.argmax()), vals.shape)
                delta, arg = m, (x, int(y), z, int(on[vi]))
    if arg is None:
        return ThinnessReport(0)
    x, y, z, v = arg
    side = concat(first_geodesic(g, x, v), first_geodesic(g, v, z))
    xy = _worst_geodesic(g, x, y, v, _maximin_table(g, x, y))
    yz = _worst_geodesic(g, y, z, v, _maximin_table(g, y, z))
    return ThinnessReport(delta, (x, y, z), (side, xy, yz), v)


def four_point_delta(g: Graph) -> float:
    """Gromov four-point constant; cross-check only."""
    D = g.dist.astype(np.int64)
    best = 0.0
    for x, y in itertools.combinations_with_replacement(range(g.n), 2):
        s1 = D[x, y] + D  # d(x,y) + d(z,w)
        s2 = D[x][:, None] + D[y][None, :]  # d(x,z) + d(y,w)
        s3 = D[x][None, :] + D[y][:, None]  # d(x,w) + d(y,z)
        stacked = np.sort(np.stack([s1, s2, s3]), axis=0)
        best = max(best, float((stacked[2] - stacked[1]).max()) / 2)
    return best


# -- nearest point retraction ----------------------------------------------

def nearest_point_projection(g: Graph, path: Sequence[int], x: int) -> list[int]:
    path = check_path(g, path)
    dists = g.dist[x, list(path)]
    m = dists.min()
    return [int(i) for i in np.flatnonzero(dists == m)]


@dataclass(frozen=True)
class RetractionConstants:
    p: int
    ambiguity: int
    witness: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {"p": self.p, "ambiguity": self.ambiguity,
                "witness": list(self.witness) if self.witness else None}


def retraction_constants(g: Graph, path: Sequence[int]) -> RetractionConstants:
    """Least integer p >= 1 with ``d(n(x), n(y)) <= p d(x, y) + p`` for every
    vertex pair and every choice of nearest points.

    ``ambiguity`` is the largest index spread of a nearest-point set.
    """
    path = check_path(g, path)
    D = g.dist
    pts = list(path)
    to_path = D[:, pts]
    nearest = to_path == to_path.min(axis=1, keepdims=True)  # (n, len)
    sub = D[np.ix_(pts, pts)]
    # spread[x, y] = max over nearest choices of d(n(x), n(y))
    spread = np.zeros((g.n, g.n), dtype=np.int64)
    ambiguity = 0
    for x in range(g.n):
        idx = np.flatnonzero(nearest[x])
        ambiguity = max(ambiguity, int(idx[-1] - idx[0]))
        rows = sub[idx].max(axis=0)  # best over choices for x, per path index
        spread[x] = np.where(nearest, rows[None, :], -1).max(axis=1)
    need = -(-spread // (D + 1))  # ceil(spread / (d + 1))
    p = max(1, int(need.max()))
    witness = None
    if need.max() > 1:
        x, y = np.unravel_index(int(need.argmax()), need.shape)
        witness = (int(x), int(y))
    return RetractionConstants(p, ambiguity, witness)
