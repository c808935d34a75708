"""The once-punctured torus: Farey graph, annular projections, markings.

Slopes are reduced fractions p/q with q >= 0 (``1/0`` is infinity) and
mapping classes are SL(2, Z) matrices modulo +-I acting projectively.  A
marking is a base slope together with a transversal slope meeting it once.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .metric_core import Graph


class SlopeError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if (p, q) == (0, 0):
            raise SlopeError("0/0 is not a slope")
        if math.gcd(p, q) != 1 or q < 0 or (q == 0 and p != 1):
            raise SlopeError(f"{p}/{q} is not in canonical form; use Slope.of")

    @classmethod
    def of(cls, p: int, q: int = 1) -> "Slope":
        if (p, q) == (0, 0):
            raise SlopeError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        text = text.strip()
        if text in ("inf", "oo", "∞"):
            return INF
        m = re.fullmatch(r"(-?\d+)(?:/(-?\d+))?", text)
        if not m:
            raise SlopeError(f"invalid slope {text!r}")
        return cls.of(int(m.group(1)), int(m.group(2) or 1))

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    @property
    def is_inf(self) -> bool:
        return self.q == 0


INF = Slope(1, 0)
ZERO = Slope(0, 1)


def det(a: Slope, b: Slope) -> int:
    return a.p * b.q - a.q * b.p


def farey_adjacent(a: Slope, b: Slope) -> bool:
    return abs(det(a, b)) == 1


@dataclass(frozen=True)
class SL2:
    """Integer matrix [[a, b], [c, d]] with ad - bc = 1, kept up to sign."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise SlopeError("matrix must have determinant 1")
        entries = (self.a, self.b, self.c, self.d)
        lead = next(e for e in entries if e)
        if lead < 0:
            for name, e in zip("abcd", entries):
                object.__setattr__(self, name, -e)

    @classmethod
    def parse(cls, text: str) -> "SL2":
        try:
            vals = [int(t) for t in text.replace(" ", "").split(",")]
        except ValueError:
            raise SlopeError(f"invalid matrix {text!r}") from None
        if len(vals) != 4:
            raise SlopeError("matrix needs four integers a,b,c,d (row-major)")
        return cls(*vals)

    def __matmul__(self, o: "SL2") -> "SL2":
        return SL2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                   self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> "SL2":
        return SL2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "SL2":
        base = self if k >= 0 else self.inverse()
        out, k = IDENTITY, abs(k)
        while k:
            if k & 1:
                out = out @ base
            base, k = base @ base, k >> 1
        return out

    def __call__(self, s):
        return apply_mapping_class(self, s)

    def entries(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]


IDENTITY = SL2(1, 0, 0, 1)
T_INF = SL2(1, 1, 0, 1)


@dataclass(frozen=True)
class Marking:
    base: Slope
    transversal: Slope

    def __post_init__(self):
        if abs(det(self.base, self.transversal)) != 1:
            raise SlopeError(f"{self} is not a marking: slopes must meet once")

    @classmethod
    def parse(cls, text: str) -> "Marking":
        m = re.fullmatch(r"\(?\s*([^|()]+)\|([^|()]+)\s*\)?", text.strip())
        if not m:
            raise SlopeError(f"invalid marking {text!r}")
        return cls(Slope.parse(m.group(1)), Slope.parse(m.group(2)))

    def __str__(self) -> str:
        return f"({self.base}|{self.transversal})"


def apply_mapping_class(M: SL2, s):
    if isinstance(s, Marking):
        return Marking(apply_mapping_class(M, s.base), apply_mapping_class(M, s.transversal))
    return Slope.of(M.a * s.p + M.b * s.q, M.c * s.p + M.d * s.q)


def sending_inf_to(alpha: Slope) -> SL2:
    """Matrix [[p, r], [q, s]] mapping infinity to alpha = p/q.

    The second column is the neighbour r/s of alpha given by the inverse of
    p modulo q (the previous continued-fraction convergent up to sign).
    """
    p, q = alpha.p, alpha.q
    if q == 0:
        return IDENTITY
    s = pow(p, -1, q) if q > 1 else 0
    r = (p * s - 1) // q
    return SL2(p, r, q, s)


def normalizer(alpha: Slope, shift: int = 0) -> SL2:
    """An element sending alpha to infinity; ``shift`` post-composes with T^shift."""
    return (T_INF ** shift) @ sending_inf_to(alpha).inverse()


def twist_matrix(alpha: Slope) -> SL2:
    """Dehn twist about alpha: the conjugate of [[1,1],[0,1]] fixing alpha."""
    p, q = alpha.p, alpha.q
    return SL2(1 - p * q, p * p, -q * q, 1 + p * q)


# -- Farey distance ---------------------------------------------------------

def ancestors(x: Slope) -> set[Slope]:
    """Endpoints of every Farey interval met while descending the Stern-Brocot
    tree to x (positive and negative halves are rooted at 0/1 and 1/0)."""
    if x.is_inf:
        return {INF}
    sign = 1 if x.p >= 0 else -1
    P, Q = abs(x.p), x.q
    lo, hi = (0, 1), (1, 0)
    out = {lo, hi}
    while (P, Q) not in (lo, hi):
        m = (lo[0] + hi[0], lo[1] + hi[1])
        out.add(m)
        if m == (P, Q):
            break
        if P * m[1] < m[0] * Q:
            hi = m
        else:
            lo = m
    return {Slope.of(sign * a, b) for a, b in out}


def farey_closure(slopes: Iterable[Slope]) -> set[Slope]:
    """0/1, 1/0 and all Stern-Brocot ancestors of the given slopes.

    Every Farey geodesic between two of the slopes stays in this set: each
    edge separating two slopes shows up in the descent to one of them.
    """
    out = {INF, ZERO}
    for s in slopes:
        out |= ancestors(s)
    return out


def _bfs_within(source: Slope, target: Slope, allowed: set[Slope]) -> int:
    nodes = sorted(allowed)
    seen = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u == target:
            return seen[u]
        for w in nodes:
            if w not in seen and farey_adjacent(u, w):
                seen[w] = seen[u] + 1
                queue.append(w)
    raise AssertionError("Farey closure is disconnected")  # pragma: no cover


def farey_distance(a: Slope, b: Slope) -> int:
    if a == b:
        return 0
    if farey_adjacent(a, b):
        return 1
    return _bfs_within(a, b, farey_closure((a, b)))


def farey_geodesic(a: Slope, b: Slope) -> list[Slope]:
    """One Farey geodesic from a to b (smallest slopes first)."""
    allowed = sorted(farey_closure((a, b)))
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in allowed:
            if w not in prev and farey_adjacent(u, w):
                prev[w] = u
                queue.append(w)
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def farey_subgraph(slopes: Iterable[Slope]) -> tuple[Graph, list[Slope]]:
    """Induced Farey graph on the closure of ``slopes``; distances between the
    given slopes agree with the full Farey graph."""
    verts = sorted(farey_closure(slopes))
    edges = [(i, j) for i, j in itertools.combinations(range(len(verts)), 2)
             if farey_adjacent(verts[i], verts[j])]
    return Graph(len(verts), frozenset(edges)), verts


def farey_ball_graph(center: Slope, radius: int, entry_bound: int) -> tuple[Graph, list[Slope]]:
    """Slopes with |p|, |q| <= entry_bound within ``radius`` of ``center``."""
    verts = sorted(
        s for s in (Slope.of(p, q) for q in range(entry_bound + 1)
                    for p in range(-entry_bound, entry_bound + 1) if (p, q) != (0, 0))
        if s.q == 0 or math.gcd(s.p, s.q) == 1
    )
    verts = sorted({v for v in verts if farey_distance(center, v) <= radius})
    edges = [(i, j) for i, j in itertools.combinations(range(len(verts)), 2)
             if farey_adjacent(verts[i], verts[j])]
    return Graph(len(verts), frozenset(edges)), verts


# -- annular projections ------------------------------------------------------

class CoreCurveError(ValueError):
    pass


def twist_coordinate(alpha: Slope, beta: Slope, shift: int = 0) -> int:
    """Integer part of beta after sending alpha to infinity."""
    if beta == alpha:
        raise CoreCurveError("curve equals annulus core")
    nb = apply_mapping_class(normalizer(alpha, shift), beta)
    return nb.p // nb.q


def annular_projection_distance(alpha: Slope, beta: Slope, gamma: Slope, shift: int = 0) -> int:
    """Twisting of gamma relative to beta around alpha."""
    if beta == alpha or gamma == alpha:
        raise CoreCurveError("curve equals annulus core")
    return abs(twist_coordinate(alpha, beta, shift) - twist_coordinate(alpha, gamma, shift))


def _curve_seen_by(alpha: Slope, m: Marking) -> Slope:
    # a base curve is invisible to its own annulus, which sees the transversal instead
    return m.transversal if m.base == alpha else m.base


def marking_projection_distance(alpha: Slope, m1: Marking, m2: Marking) -> int:
    return annular_projection_distance(alpha, _curve_seen_by(alpha, m1), _curve_seen_by(alpha, m2))


def convergents(x: Slope) -> list[Slope]:
    if x.is_inf:
        return [INF]
    out = []
    p, q = x.p, x.q
    h0, h1, k0, k1 = 0, 1, 1, 0
    while q:
        a, r = divmod(p, q)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Slope.of(h1, k1))
        p, q = q, r
    return out


class Annuli(NamedTuple):
    cores: list[Slope]
    dropped: int


def candidate_annuli(m1: Marking, m2: Marking, denominator_bound: int) -> Annuli:
    """Annuli that can see a projection distance of 2 or more.

    If alpha is off every Farey geodesic between the two bases, some Farey
    edge cuts it off from both; after sending alpha to infinity both bases
    lie in one unit interval, so their twist coordinates differ by at most
    one.  Base curves themselves are always candidates.  Cores with
    denominator above the bound are dropped (and counted), except
    continued-fraction convergents of the bases.
    """
    keep = {m1.base, m2.base} | set(convergents(m1.base)) | set(convergents(m2.base))
    cores, dropped = [], 0
    for s in sorted(farey_closure((m1.base, m2.base)) | keep):
        if s.q <= denominator_bound or s in keep:
            cores.append(s)
        else:
            dropped += 1
    return Annuli(cores, dropped)


# -- marking graph ------------------------------------------------------------

def marking_neighbors(m: Marking) -> tuple[Marking, Marking, Marking]:
    """Twist, inverse twist and flip."""
    T = twist_matrix(m.base)
    return (
        Marking(m.base, apply_mapping_class(T, m.transversal)),
        Marking(m.base, apply_mapping_class(T.inverse(), m.transversal)),
        Marking(m.transversal, m.base),
    )


def shadow(m: Marking) -> Slope:
    return m.base


class MarkingDistance(NamedTuple):
    value: int
    exact: bool  # False: the true distance is at least ``value``


def marking_distance(m1: Marking, m2: Marking, radius_cap: int = 12) -> MarkingDistance:
    """Bidirectional breadth-first search in the marking graph."""
    if m1 == m2:
        return MarkingDistance(0, True)
    dist = ({m1: 0}, {m2: 0})
    front = ([m1], [m2])
    radius = [0, 0]
    while radius[0] + radius[1] < radius_cap and front[0] and front[1]:
        side = 0 if len(front[0]) <= len(front[1]) else 1
        mine, other = dist[side], dist[1 - side]
        nxt, best = [], None
        for u in front[side]:
            for w in marking_neighbors(u):
                if w in mine:
                    continue
                mine[w] = radius[side] + 1
                nxt.append(w)
                if w in other:
                    total = mine[w] + other[w]
                    best = total if best is None else min(best, total)
        radius[side] += 1
        front = (nxt, front[1]) if side == 0 else (front[0], nxt)
        if best is not None:
            return MarkingDistance(best, True)
    return MarkingDistance(radius_cap + 1, False)


def marking_ball(center: Marking, radius: int) -> dict[Marking, int]:
    seen = {center: 0}
    queue = deque([center])
    while queue:
        u = queue.popleft()
        if seen[u] == radius:
            continue
        for w in marking_neighbors(u):
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return seen


def marking_ball_graph(center: Marking, radius: int) -> tuple[Graph, list[Marking]]:
    """Induced marking graph on a ball (vertex 0 is the center)."""
    ball = marking_ball(center, radius)
    order = sorted(ball, key=lambda m: (ball[m], m.base, m.transversal))
    index = {m: i for i, m in enumerate(order)}
    edges = set()
    for m in order:
        for w in marking_neighbors(m):
            if w in index:
                i, j = index[m], index[w]
                edges.add((min(i, j), max(i, j)))
    return Graph(len(order), frozenset(edges)), order


# -- distance formula ---------------------------------------------------------

@dataclass(frozen=True)
class DistanceFormulaConfig:
    A: int
    K_fit: Fraction | None = None

    def __post_init__(self):
        if self.A < 1:
            raise ValueError("threshold A must be >= 1")


@dataclass
class DistanceFormulaTerms:
    total: int
    curve_term: int
    annuli: dict[str, int] = field(default_factory=dict)
    candidates: int = 0
    dropped: int = 0

    @property
    def truncated(self) -> bool:
        return self.dropped > 0

    def to_dict(self) -> dict:
        return {"rhs": self.total, "curve_graph_term": self.curve_term,
                "annuli": self.annuli, "annuli_examined": self.candidates,
                "annuli_dropped_by_denominator_bound": self.dropped,
                "truncated": self.truncated}


def threshold(x: int, A: int) -> int:
    return x if x >= A else 0


def distance_formula_rhs(m1: Marking, m2: Marking, cfg: DistanceFormulaConfig,
                         denominator_bound: int = 200) -> DistanceFormulaTerms:
    """Curve-graph distance of the shadows plus thresholded annular terms."""
    cores, dropped = candidate_annuli(m1, m2, denominator_bound)
    curve = farey_distance(shadow(m1), shadow(m2))
    terms = DistanceFormulaTerms(curve, curve, candidates=len(cores), dropped=dropped)
    for alpha in cores:
        t = threshold(marking_projection_distance(alpha, m1, m2), cfg.A)
        if t:
            terms.annuli[str(alpha)] = t
            terms.total += t
    return terms


def fit_comparison_constant(samples: Sequence[tuple[int, int]], k_max: int = 1000) -> int | None:
    """Least integer K >= 1 with ``d/K - K <= rhs <= K d + K`` for every
    (d, rhs) sample; None if none up to ``k_max``."""
    for K in range(1, k_max + 1):
        if all(d - K * K <= K * rhs and rhs <= K * d + K for d, rhs in samples):
            return K
    return None


# -- orbits -------------------------------------------------------------------

@dataclass
class OrbitReport:
    E: int
    E_trace: list[int]
    farey_trace: list[int]
    shadow_diameter: int
    worst_annulus: str | None
    dropped: int

    def to_dict(self) -> dict:
        return {"E": self.E, "E_trace": self.E_trace, "shadow_distance_trace": self.farey_trace,
                "shadow_orbit_diameter": self.shadow_diameter,
                "worst_annulus": self.worst_annulus,
                "annuli_dropped_by_denominator_bound": self.dropped,
                "truncated": self.dropped > 0}


def orbit_projection_bound(M: SL2, mu: Marking, k_max: int,
                           denominator_bound: int = 200) -> OrbitReport:
    """Annular projections between mu and M^k mu for k = 1..k_max and the
    growth of the shadow orbit in the Farey graph."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    orbit = [mu]
    for _ in range(k_max):
        orbit.append(apply_mapping_class(M, orbit[-1]))
    E, worst, dropped = 0, None, 0
    E_trace, farey_trace = [], []
    for k in range(1, k_max + 1):
        cores, lost = candidate_annuli(mu, orbit[k], denominator_bound)
        dropped += lost
        ek = 0
        for alpha in cores:
            v = marking_projection_distance(alpha, mu, orbit[k])
            if v > ek:
                ek = v
                if v > E:
                    E, worst = v, str(alpha)
        E_trace.append(ek)
        farey_trace.append(farey_distance(mu.base, orbit[k].base))
    shadows = sorted({m.base for m in orbit})
    diam = max((farey_distance(a, b) for a, b in itertools.combinations(shadows, 2)), default=0)
    return OrbitReport(E, E_trace, farey_trace, diam, worst, dropped)
