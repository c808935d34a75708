"""l1 products of graphs and a pair of diverging quasigeodesics in them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .metric_core import Graph, GraphError, Path, concat, first_geodesic


@dataclass(frozen=True)
class ProductGraph:
    """1-skeleton of X x Y; the pair (x, y) has id ``x * |Y| + y``."""

    X: Graph
    Y: Graph
    Z: Graph

    def vid(self, x: int, y: int) -> int:
        return x * self.Y.n + y

    def coords(self, z: int) -> tuple[int, int]:
        return divmod(z, self.Y.n)


def build_product(X: Graph, Y: Graph) -> ProductGraph:
    if not (X.is_connected() and Y.is_connected()):
        raise GraphError("not connected")
    m = Y.n
    edges = []
    for x in range(X.n):
        for a, b in Y.edges:
            edges.append((x * m + a, x * m + b))
    for a, b in X.edges:
        for y in range(m):
            edges.append((a * m + y, b * m + y))
    return ProductGraph(X, Y, Graph(X.n * m, frozenset(edges)))


class LemmaPaths(NamedTuple):
    gamma_a: Path
    gamma_b: Path
    hausdorff_lower_bound: int


def lemma_paths(P: ProductGraph, z1: tuple[int, int], z2: tuple[int, int]) -> LemmaPaths:
    """Two quasigeodesics from z1 to z2 that stay far apart.

    With d the larger coordinate displacement (say in X), ``gamma_a`` runs
    along X at height y1 and then along Y at x2; it is a geodesic.
    ``gamma_b`` first climbs in Y to a vertex y3 with d_Y(y1, y3) = d, runs
    along X there, then descends to y2.  It is a 3-quasigeodesic and passes
    through (x1, y3), which is at distance >= d from ``gamma_a``.
    Factors are swapped internally when the Y displacement is larger.
    """
    (x1, y1), (x2, y2) = z1, z2
    X, Y = P.X, P.Y
    swap = Y.d(y1, y2) > X.d(x1, x2)
    if swap:
        X, Y = Y, X
        x1, y1, x2, y2 = y1, x1, y2, x2

    def lift(pairs):
        return tuple(P.vid(b, a) if swap else P.vid(a, b) for a, b in pairs)

    d = X.d(x1, x2)
    far = [y for y in range(Y.n) if Y.d(y1, y) == d]
    if not far:
        raise GraphError("Y eccentricity too small")
    y3 = far[0]
    sx = first_geodesic(X, x1, x2)
    sy = first_geodesic(Y, y1, y2)
    tau = first_geodesic(Y, y1, y3)
    omega = first_geodesic(Y, y3, y2)
    gamma_a = concat(lift((x, y1) for x in sx), lift((x2, y) for y in sy))
    gamma_b = concat(
        lift((x1, y) for y in tau),
        lift((x, y3) for x in sx),
        lift((x2, y) for y in omega),
    )
    return LemmaPaths(gamma_a, gamma_b, d)


def length_ratio_violation(g: Graph, path, K: int) -> tuple[int, int] | None:
    """First index pair i < j with ``j - i > K * d(p_i, p_j)``, or None."""
    D = g.dist
    for i in range(len(path)):
        row = D[path[i]]
        for j in range(i + 1, len(path)):
            if j - i > K * row[path[j]]:
                return (i, j)
    return None
