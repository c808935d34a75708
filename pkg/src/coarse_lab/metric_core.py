"""Exact metric computations on finite, connected, unweighted graphs.

Paths are tuples of vertex ids indexed by ``0..N``; consecutive entries are
equal (a pause) or adjacent.  Quasi-isometric constants follow the single
constant convention ``d/K - K <= d' <= K d + K``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

Path = tuple[int, ...]


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are stored as sorted pairs.  The distance table is computed once
    on first use and cached; it is never mutated afterwards.
    """

    n: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        edges = list(edges)
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(edges))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def dist(self) -> np.ndarray:
        return distance_matrix(self)

    def d(self, u: int, v: int) -> int:
        return int(self.dist[u, v])

    @property
    def diameter(self) -> int:
        return int(self.dist.max())

    def is_connected(self) -> bool:
        return len(_bfs(self.adj, 0)) == self.n

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adj[u]

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph; vertex ``i`` of the result is ``vertices[i]``."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(vertices), frozenset(edges))

    # plain-text edge list: "n <count>" then one "u v" per line
    def dumps(self) -> str:
        lines = [f"n {self.n}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Graph":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise GraphError("empty graph file")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "n":
            raise GraphError("first line must be 'n <vertex_count>'")
        try:
            n = int(head[1])
            edges = []
            for ln in lines[1:]:
                parts = ln.split()
                if len(parts) != 2:
                    raise GraphError(f"malformed edge line {ln!r}")
                edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphError(f"malformed graph file: {exc}") from None
        return cls.from_edges(n, edges)

    @classmethod
    def load(cls, path) -> "Graph":
        with open(path) as fh:
            return cls.loads(fh.read())


def _bfs(adj, source: int) -> dict[int, int]:
    seen = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return seen


def distance_matrix(g: Graph) -> np.ndarray:
    """All-pairs hop distances by one BFS per vertex."""
    out = np.full((g.n, g.n), -1, dtype=np.int64)
    for s in range(g.n):
        for v, dv in _bfs(g.adj, s).items():
            out[s, v] = dv
    if (out < 0).any():
        raise GraphError("not connected")
    out.setflags(write=False)
    return out


# -- small graph families used throughout tests and the CLI ---------------

def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs at least 3 vertices")
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def grid_graph(rows: int, cols: int | None = None) -> Graph:
    """Grid with vertex id ``r * cols + c``."""
    cols = rows if cols is None else cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, frozenset(edges))


def tree_from_parents(parents: Sequence[int]) -> Graph:
    """Tree where vertex ``i + 1`` hangs off ``parents[i]`` (< i + 1)."""
    edges = []
    for i, p in enumerate(parents):
        if not 0 <= p <= i:
            raise GraphError(f"parent {p} of vertex {i + 1} must precede it")
        edges.append((p, i + 1))
    return Graph(len(parents) + 1, frozenset(edges))


def comb_tree(spine: int, tooth: int) -> Graph:
    """Path ``0..spine`` with a pendant path of length ``tooth`` at every spine vertex."""
    edges = [(i, i + 1) for i in range(spine)]
    nxt = spine + 1
    for s in range(spine + 1):
        prev = s
        for _ in range(tooth):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return Graph(nxt, frozenset(edges))


# -- paths ------------------------------------------------------------------

def check_path(g: Graph, path: Sequence[int]) -> Path:
    if len(path) == 0:
        raise GraphError("empty path")
    for a, b in zip(path, path[1:]):
        if a != b and b not in g.adj[a]:
            raise GraphError(f"path step {a}->{b} is not an edge")
    return tuple(int(v) for v in path)


def concat(*paths: Sequence[int]) -> Path:
    """Concatenate paths that share junction vertices."""
    out: list[int] = list(paths[0])
    for p in paths[1:]:
        if out[-1] != p[0]:
            raise GraphError("paths do not share a junction vertex")
        out.extend(p[1:])
    return tuple(out)


class GeodesicSet(NamedTuple):
    paths: list[Path]
    overflow: bool


def geodesics_between(g: Graph, u: int, v: int, cap: int) -> GeodesicSet:
    """Geodesics from u to v in lexicographic order, at most ``cap`` of them."""
    D = g.dist
    total = int(D[u, v])
    if cap < total:
        raise GraphError("cap below distance")
    out: list[Path] = []
    stack = [u]

    def walk(x: int) -> bool:
        if x == v:
            if len(out) >= cap:
                return True
            out.append(tuple(stack))
            return False
        left = D[x, v] - 1
        for w in g.adj[x]:
            if D[w, v] == left:
                stack.append(w)
                stop = walk(w)
                stack.pop()
                if stop:
                    return True
        return False

    overflow = walk(u)
    return GeodesicSet(out, overflow)


def first_geodesic(g: Graph, u: int, v: int) -> Path:
    """Lexicographically smallest geodesic from u to v."""
    D = g.dist
    path = [u]
    while path[-1] != v:
        x = path[-1]
        path.append(next(w for w in g.adj[x] if D[w, v] == D[x, v] - 1))
    return tuple(path)


def count_geodesics(g: Graph, u: int, v: int) -> int:
    D = g.dist
    order = sorted(range(g.n), key=lambda w: D[u, w])
    ways = [0] * g.n
    ways[u] = 1
    for w in order:
        if D[u, w] + D[w, v] != D[u, v] or w == u:
            continue
        ways[w] = sum(ways[x] for x in g.adj[w] if D[u, x] == D[u, w] - 1)
    return ways[v]


def interval(g: Graph, u: int, v: int) -> np.ndarray:
    """Vertices lying on some geodesic from u to v."""
    D = g.dist
    return np.flatnonzero(D[u] + D[:, v] == D[u, v])


# -- quasigeodesics ---------------------------------------------------------

class QuasiCheck(NamedTuple):
    ok: bool
    witness: tuple[int, int] | None


def as_constant(K) -> Fraction:
    K = Fraction(K)
    if K < 1:
        raise ValueError(f"quasi constant must be >= 1, got {K}")
    return K


def span_limits(K, max_d: int) -> np.ndarray:
    """``limit[d]`` = largest index span compatible with distance d under the lower bound."""
    K = as_constant(K)
    return np.array([int(K * (d + K)) for d in range(max_d + 1)], dtype=np.int64)


def is_quasigeodesic(g: Graph, path: Sequence[int], K) -> QuasiCheck:
    """Check ``|i-j|/K - K <= d(p_i, p_j) <= K|i-j| + K`` over all index pairs.

    The witness is the pair with the largest violation; ties go to the
    shortest span, then to the lexicographically smallest pair.
    """
    K = as_constant(K)
    path = check_path(g, path)
    D = g.dist
    best = None
    for i in range(len(path)):
        row = D[path[i]]
        for j in range(i + 1, len(path)):
            s = j - i
            d = int(row[path[j]])
            excess = max(s / K - K - d, d - K * s - K)
            if excess > 0:
                key = (-excess, s, i, j)
                if best is None or key < best:
                    best = key
    if best is None:
        return QuasiCheck(True, None)
    return QuasiCheck(False, (best[2], best[3]))


# -- Hausdorff distance and quasiconvexity ----------------------------------

def distance_to_set(g: Graph, A: Iterable[int]) -> np.ndarray:
    A = sorted(set(A))
    if not A:
        raise GraphError("empty vertex set")
    return g.dist[A].min(axis=0)


def hausdorff_distance(g: Graph, A: Iterable[int], B: Iterable[int]) -> int:
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        raise GraphError("empty vertex set")
    sub = g.dist[np.ix_(A, B)]
    return int(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def quasiconvexity_constant(g: Graph, C: Iterable[int]) -> int:
    """Least K with every geodesic between points of C inside N_K(C).

    A vertex lies on some geodesic [c1, c2] exactly when it sits in the
    interval between them, so no enumeration is needed.
    """
    C = sorted(set(C))
    if not C:
        raise GraphError("empty vertex set")
    D = g.dist
    to_c = D[C].min(axis=0)
    worst = 0
    for a in range(len(C)):
        for b in range(a + 1, len(C)):
            on = D[C[a]] + D[C[b]] == D[C[a], C[b]]
            worst = max(worst, int(to_c[on].max()))
    return worst
