"""Empirical stability of vertex subsets.

A subset is stable when quasigeodesics with endpoints on it fellow travel
uniformly.  On a finite graph this can only be observed, so everything here
reports the largest divergence seen among enumerated quasigeodesics,
together with the caps that bounded the search.
"""
from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .metric_core import (
    Graph,
    GraphError,
    Path,
    as_constant,
    check_path,
    concat,
    first_geodesic,
    is_quasigeodesic,
    span_limits,
)

log = logging.getLogger(__name__)


class QuasigeodesicSet(NamedTuple):
    paths: list[Path]
    overflow: bool


def _detour_candidates(g: Graph, u: int, v: int, limits: np.ndarray, length_cap: int) -> list[Path]:
    """Paths [u, w] . [w, v] through every vertex w that are quasigeodesic."""
    D = g.dist
    out = []
    for w in range(g.n):
        if D[u, w] + D[w, v] > length_cap:
            continue
        p = concat(first_geodesic(g, u, w), first_geodesic(g, w, v))
        if _valid(D, p, limits):
            out.append(p)
    return out


def _valid(D: np.ndarray, p: Sequence[int], limits: np.ndarray) -> bool:
    for j in range(1, len(p)):
        row = D[p[j]]
        for i in range(j):
            if j - i > limits[row[p[i]]]:
                return False
    return True


def enumerate_quasigeodesics(
    g: Graph,
    u: int,
    v: int,
    L,
    length_cap: int,
    count_cap: int = 10_000,
    *,
    pauses: bool = True,
    detours: bool = True,
    expansion_cap: int | None = None,
) -> QuasigeodesicSet:
    """L-quasigeodesics from u to v with at most ``length_cap`` steps.

    Detour paths ``[u, w] . [w, v]`` that qualify come first; the rest is a
    depth-first search that tries steps toward v before steps away from it.
    Prefixes are cut as soon as a pair of indices breaks the lower bound,
    when v is out of reach in the remaining budget, or when the earliest
    index by which the path must end (forced by the lower bound between
    each prefix point and v) has already passed.  The result is sound;
    ``overflow`` means the list may be incomplete.
    """
    L = as_constant(L)
    D = g.dist
    if length_cap < D[u, v]:
        raise GraphError("length cap below distance")
    limits = span_limits(L, int(D.max()))
    expansion_cap = 200 * count_cap if expansion_cap is None else expansion_cap

    found: dict[Path, None] = {}
    if detours:
        for p in _detour_candidates(g, u, v, limits, length_cap):
            found.setdefault(p)
            if len(found) >= count_cap:
                return QuasigeodesicSet(list(found)[:count_cap], True)

    Dl = D.tolist()
    lim = limits.tolist()
    Dv = [row[v] for row in Dl]
    stack = [u]
    # deadline[j] = min over i <= j of i + lim[d(p_i, v)]
    deadline = [lim[Dv[u]]]
    expansions = 0
    overflow = False

    def grow() -> bool:
        nonlocal expansions, overflow
        j = len(stack) - 1
        x = stack[-1]
        if x == v:
            p = tuple(stack)
            if p not in found:
                found[p] = None
                if len(found) >= count_cap:
                    overflow = True
                    return True
        if j == length_cap:
            return False
        options = list(g.adj[x]) + ([x] if pauses else [])
        options.sort(key=lambda w: (Dv[w], w))
        for w in options:
            k = j + 1
            if k + Dv[w] > min(length_cap, deadline[-1]):
                continue
            row = Dl[w]
            if any(k - i > lim[row[stack[i]]] for i in range(j + 1)):
                continue
            expansions += 1
            if expansions > expansion_cap:
                overflow = True
                return True
            stack.append(w)
            deadline.append(min(deadline[-1], k + lim[Dv[w]]))
            stop = grow()
            stack.pop()
            deadline.pop()
            if stop:
                return True
        return False

    grow()
    return QuasigeodesicSet(list(found), overflow)


class Divergence(NamedTuple):
    radius: int
    witness: tuple[Path, Path] | None


def max_pairwise_hausdorff(g: Graph, paths: Sequence[Sequence[int]]) -> Divergence:
    """Largest Hausdorff distance between two paths of the pool.

    Over all ordered pairs (A, B) this equals the largest d(a, B) with a on
    some path, so one distance-to-set vector per distinct vertex set does.
    """
    if not paths:
        return Divergence(0, None)
    sets: dict[frozenset, Path] = {}
    for p in paths:
        sets.setdefault(frozenset(p), tuple(p))
    keys = list(sets)
    union = sorted(set().union(*keys))
    owner = {}
    for k in keys:
        for a in k:
            owner.setdefault(a, k)
    D = g.dist
    best, arg = -1, None
    for k in keys:
        to_k = D[sorted(k)][:, union].min(axis=0)
        i = int(to_k.argmax())
        if to_k[i] > best:
            best, arg = int(to_k[i]), (owner[union[i]], k)
    if best == 0:
        return Divergence(0, None)
    return Divergence(best, (sets[arg[0]], sets[arg[1]]))


# -- embedded subsets -------------------------------------------------------

@dataclass(frozen=True)
class EmbeddedSubset:
    """A vertex subset of ``ambient`` with its own intrinsic graph.

    Intrinsic vertex ``i`` corresponds to ``subset[i]``.  Without an explicit
    intrinsic graph the induced subgraph is used.
    """

    ambient: Graph
    subset: tuple[int, ...]
    intrinsic: Graph | None = None

    def __post_init__(self):
        sub = tuple(int(s) for s in self.subset)
        if not sub:
            raise GraphError("empty subset")
        if len(set(sub)) != len(sub):
            raise GraphError("subset has repeated vertices")
        if any(not 0 <= s < self.ambient.n for s in sub):
            raise GraphError("subset vertex out of range")
        object.__setattr__(self, "subset", sub)
        if self.intrinsic is None:
            object.__setattr__(self, "intrinsic", self.ambient.induced(sub))
        elif self.intrinsic.n != len(sub):
            raise GraphError("intrinsic graph size differs from subset size")


def distortion_profile(S: EmbeddedSubset) -> Fraction:
    """max over subset pairs of intrinsic distance / ambient distance."""
    if not S.intrinsic.is_connected():
        raise GraphError("intrinsic graph not connected")
    Di = S.intrinsic.dist
    Da = S.ambient.dist[np.ix_(S.subset, S.subset)]
    worst = Fraction(1)
    for i, j in itertools.combinations(range(len(S.subset)), 2):
        worst = max(worst, Fraction(int(Di[i, j]), int(Da[i, j])))
    return worst


def subdivide(g: Graph, k: int) -> tuple[Graph, list[int]]:
    """Replace every edge by a path of k edges; original vertices keep their ids."""
    if k < 1:
        raise ValueError("k must be >= 1")
    edges = []
    nxt = g.n
    for u, v in sorted(g.edges):
        chain = [u] + list(range(nxt, nxt + k - 1)) + [v]
        nxt += k - 1
        edges.extend(zip(chain, chain[1:]))
    return Graph(nxt, frozenset(edges)), list(range(g.n))


# -- stability profiles -----------------------------------------------------

@dataclass
class StabilityProfile:
    L: Fraction
    length_cap: int | None
    R_observed: int
    endpoint_pairs_tested: int
    divergent_witness: tuple[Path, Path] | None = None
    lower_bound: bool = False
    paths_examined: int = 0
    per_pair: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L": str(self.L),
            "length_cap": self.length_cap,
            "R_observed": self.R_observed,
            "R_is_lower_bound": self.lower_bound,
            "endpoint_pairs_tested": self.endpoint_pairs_tested,
            "paths_examined": self.paths_examined,
            "divergent_witness": [list(p) for p in self.divergent_witness]
            if self.divergent_witness else None,
            "per_pair": {f"{a},{b}": r for (a, b), r in sorted(self.per_pair.items())},
        }


def default_length_cap(d: int) -> int:
    return 4 * d + 8


def _pair_job(args):
    g, u, v, L, cap, count_cap, seeds = args
    qs = enumerate_quasigeodesics(g, u, v, L, cap, count_cap)
    pool = list(qs.paths)
    limits = span_limits(L, int(g.dist.max()))
    for s in seeds:
        s = check_path(g, s)
        if s[0] != u or s[-1] != v or len(s) - 1 > cap:
            raise GraphError(f"seed path does not run {u}->{v} within the cap")
        if not _valid(g.dist, s, limits):
            raise GraphError("seed path is not an L-quasigeodesic")
        pool.append(s)
    div = max_pairwise_hausdorff(g, pool)
    return (u, v), div, qs.overflow, len(pool)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("COARSE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def stability_profile(
    S: EmbeddedSubset,
    L,
    length_cap: int | None = None,
    count_cap: int = 10_000,
    seeds: dict[tuple[int, int], Iterable[Sequence[int]]] | None = None,
) -> StabilityProfile:
    """Largest observed divergence of L-quasigeodesics over subset endpoint pairs.

    ``length_cap=None`` uses ``4 d + 8`` per pair.  ``seeds`` maps an
    endpoint pair to extra certified paths added to that pair's pool.
    """
    L = as_constant(L)
    if len(S.subset) < 2:
        raise GraphError("subset needs at least two vertices")
    g = S.ambient
    seeds = seeds or {}
    jobs = []
    for u, v in itertools.combinations(S.subset, 2):
        cap = default_length_cap(g.d(u, v)) if length_cap is None else length_cap
        jobs.append((g, u, v, L, cap, count_cap, list(seeds.get((u, v), ()))))
    workers = _workers()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_pair_job, jobs))
    else:
        results = [_pair_job(j) for j in jobs]

    prof = StabilityProfile(L, length_cap, 0, len(jobs))
    for pair, div, overflow, n in results:  # job order is fixed, so ties resolve deterministically
        prof.per_pair[pair] = div.radius
        prof.lower_bound |= overflow
        prof.paths_examined += n
        if div.radius > prof.R_observed:
            prof.R_observed, prof.divergent_witness = div.radius, div.witness
    return prof


def stability_trend(S: EmbeddedSubset, L, caps: Sequence[int], count_cap: int = 10_000) -> dict:
    """Profiles over growing length caps with a coarse growth label.

    The label is a reporting policy: ``bounded`` when the last two caps agree
    within 1, ``growing`` otherwise.
    """
    profiles = [stability_profile(S, L, c, count_cap) for c in caps]
    rs = [p.R_observed for p in profiles]
    label = "bounded" if len(rs) < 2 or rs[-1] - rs[-2] <= 1 else "growing"
    return {"caps": list(caps), "R": rs, "label": label,
            "label_policy": "last two caps within 1",
            "lower_bound": any(p.lower_bound for p in profiles)}


def quasigeodesic_constant(g: Graph, path: Sequence[int]) -> Fraction:
    """Smallest integer K for which ``path`` is a K-quasigeodesic (as a Fraction)."""
    K = 1
    while not is_quasigeodesic(g, path, K).ok:
        K += 1
    return Fraction(K)
