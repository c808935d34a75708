"""Uniformly contracting path families and their fellow-traveling radius."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .metric_core import Graph, GraphError, Path, check_path, hausdorff_distance
from .stability import default_length_cap, enumerate_quasigeodesics


def domain_projection(g: Graph, path: Sequence[int]) -> tuple[int, ...]:
    """Vertex -> index of a nearest path point, smallest index on ties."""
    path = check_path(g, path)
    return tuple(int(i) for i in g.dist[:, list(path)].argmin(axis=1))


@dataclass(frozen=True)
class ContractionConstants:
    a: int
    b: Fraction
    c: int

    def __post_init__(self):
        b = Fraction(self.b)
        object.__setattr__(self, "b", b)
        if self.a <= 0 or self.c <= 0 or not 0 < b <= 1:
            raise ValueError("need a > 0, c > 0 and 0 < b <= 1")


@dataclass(frozen=True)
class ContractingFamily:
    """Paths in ``ambient`` joining points of ``endpoints``, each with a
    projection table (vertex -> path index).  Missing tables default to
    nearest-point projection."""

    ambient: Graph
    paths: tuple[Path, ...]
    projections: tuple[tuple[int, ...], ...] | None = None
    endpoints: tuple[int, ...] | None = None

    def __post_init__(self):
        g = self.ambient
        paths = tuple(check_path(g, p) for p in self.paths)
        if not paths:
            raise GraphError("empty family")
        object.__setattr__(self, "paths", paths)
        projs = list(self.projections or [None] * len(paths))
        if len(projs) != len(paths):
            raise GraphError("one projection table per path")
        for i, (p, pr) in enumerate(zip(paths, projs)):
            if pr is None:
                projs[i] = domain_projection(g, p)
            elif len(pr) != g.n or any(not 0 <= t < len(p) for t in pr):
                raise GraphError(f"projection table {i} is not a total map into the path domain")
            else:
                projs[i] = tuple(int(t) for t in pr)
        object.__setattr__(self, "projections", tuple(projs))
        ends = self.endpoints
        if ends is None:
            ends = sorted({p[0] for p in paths} | {p[-1] for p in paths})
        object.__setattr__(self, "endpoints", tuple(ends))
        joined = {frozenset((p[0], p[-1])) for p in paths}
        for y1, y2 in itertools.combinations(self.endpoints, 2):
            if frozenset((y1, y2)) not in joined:
                raise GraphError(f"family is not transitive: nothing joins {y1} and {y2}")

    @classmethod
    def from_json(cls, g: Graph, text: str) -> "ContractingFamily":
        data = json.loads(text)
        return cls(
            g,
            tuple(tuple(p) for p in data["paths"]),
            tuple(None if t is None else tuple(t) for t in data["projections"])
            if data.get("projections") else None,
            tuple(data["endpoints"]) if data.get("endpoints") is not None else None,
        )


def segment_diameters(g: Graph, path: Sequence[int]) -> np.ndarray:
    """``diam[i, j]`` = ambient diameter of ``path[min(i,j) .. max(i,j)]``."""
    sub = g.dist[np.ix_(path, path)]
    n = len(path)
    diam = np.zeros((n, n), dtype=np.int64)
    for span in range(1, n):
        i = np.arange(n - span)
        j = i + span
        diam[i, j] = np.maximum(np.maximum(diam[i + 1, j], diam[i, j - 1]), sub[i, j])
    return np.maximum(diam, diam.T)


@dataclass
class ConditionResult:
    passed: bool
    witness: dict | None = None


@dataclass
class ContractionCheck:
    constants: ContractionConstants
    conditions: dict[int, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def to_dict(self) -> dict:
        k = self.constants
        return {
            "constants": {"a": k.a, "b": str(k.b), "c": k.c},
            "passed": self.passed,
            "conditions": {str(i): {"passed": c.passed, "witness": c.witness}
                           for i, c in sorted(self.conditions.items())},
            "condition3_threshold": "d(x, beta(pi(x))) >= a",
        }


def check_contraction(f: ContractingFamily, k: ContractionConstants) -> ContractionCheck:
    """Test the three contraction conditions on every path of the family.

    (1) the path between t and pi(beta(t)) has diameter <= c;
    (2) adjacent vertices project to indices spanning diameter <= c;
    (3) if D = d(x, beta(pi(x))) >= a and d(x, x') <= b D, then
        the path between pi(x) and pi(x') has diameter <= c.
    Witnesses are the first violation in (path, vertex) order.
    """
    g = f.ambient
    D = g.dist
    conds = {1: ConditionResult(True), 2: ConditionResult(True), 3: ConditionResult(True)}
    edges = sorted(g.edges)
    for bi, (beta, pi) in enumerate(zip(f.paths, f.projections)):
        diam = segment_diameters(g, beta)
        pi_arr = np.asarray(pi)
        if conds[1].passed:
            for t, v in enumerate(beta):
                if diam[t, pi[v]] > k.c:
                    conds[1] = ConditionResult(False, {"path": bi, "t": t, "pi": pi[v],
                                                       "diam": int(diam[t, pi[v]])})
                    break
        if conds[2].passed:
            for x, y in edges:
                if diam[pi[x], pi[y]] > k.c:
                    conds[2] = ConditionResult(False, {"path": bi, "x": x, "y": y,
                                                       "diam": int(diam[pi[x], pi[y]])})
                    break
        if conds[3].passed:
            far = D[np.arange(g.n), np.asarray(beta)[pi_arr]]
            for x in range(g.n):
                dx = int(far[x])
                if dx < k.a:
                    continue
                reach = D[x] <= math.floor(k.b * dx)
                spans = diam[pi[x], pi_arr[reach]]
                if spans.max() > k.c:
                    xp = int(np.flatnonzero(reach)[int(spans.argmax())])
                    conds[3] = ConditionResult(False, {"path": bi, "x": x, "x_prime": xp,
                                                       "d_x_beta": dx, "diam": int(spans.max())})
                    break
    return ContractionCheck(k, conds)


@dataclass
class FellowTravel:
    R: int
    lower_bound: bool
    witness: dict | None

    def to_dict(self) -> dict:
        return {"R": self.R, "R_is_lower_bound": self.lower_bound, "witness": self.witness}


def fellow_travel_radius(
    f: ContractingFamily, L, length_cap: int | None = None, count_cap: int = 10_000
) -> FellowTravel:
    """Largest Hausdorff distance between a family path and an
    L-quasigeodesic with the same endpoints (over enumerated quasigeodesics)."""
    g = f.ambient
    best, lower, wit = 0, False, None
    for bi, beta in enumerate(f.paths):
        u, v = beta[0], beta[-1]
        cap = default_length_cap(g.d(u, v)) if length_cap is None else length_cap
        qs = enumerate_quasigeodesics(g, u, v, L, max(cap, g.d(u, v)), count_cap)
        lower |= qs.overflow
        seen = set()
        for gamma in qs.paths:
            key = frozenset(gamma)
            if key in seen:
                continue
            seen.add(key)
            h = hausdorff_distance(g, key, beta)
            if h > best:
                best, wit = h, {"path": bi, "beta": list(beta), "gamma": list(gamma)}
    return FellowTravel(best, lower, wit)


def ball_projection_diameter(f: ContractingFamily, beta: int, x: int, B1: int) -> dict:
    """Diameter of the projected image of B_R(x), R = d(x, beta) / B1.

    The image is the set of points ``beta(pi(y))`` for y in the ball; its
    diameter is measured in the ambient metric.
    """
    g = f.ambient
    path, pi = f.paths[beta], f.projections[beta]
    dx = int(g.dist[x, list(path)].min())
    if dx < B1:
        raise GraphError("ball radius below threshold")
    R = Fraction(dx, B1)
    ball = np.flatnonzero(g.dist[x] <= R)
    image = sorted({path[pi[y]] for y in ball})
    diameter = int(g.dist[np.ix_(image, image)].max())
    return {"d_x_beta": dx, "R": str(R), "ball_size": len(ball),
            "image": image, "diameter": diameter}
