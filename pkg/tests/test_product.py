import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from coarse_lab.metric_core import (
    Graph,
    GraphError,
    cycle_graph,
    grid_graph,
    hausdorff_distance,
    is_quasigeodesic,
    path_graph,
)
from coarse_lab.product import build_product, lemma_paths, length_ratio_violation
from coarse_lab.stability import EmbeddedSubset, stability_profile

from oracles import bfs_distances, to_nx
from test_metric_core import connected_graphs


def test_small_products():
    P = build_product(path_graph(2), path_graph(2))
    assert nx.is_isomorphic(to_nx(P.Z), to_nx(cycle_graph(4)))
    P = build_product(path_graph(5), path_graph(5))
    assert P.Z == grid_graph(5)
    assert P.Z.d(P.vid(0, 0), P.vid(4, 4)) == 8
    P = build_product(path_graph(2), cycle_graph(4))
    assert P.Z.d(P.vid(0, 0), P.vid(1, 2)) == 3 == bfs_distances(P.Z)[P.vid(0, 0), P.vid(1, 2)]


def test_export_id_rule():
    P = build_product(path_graph(3), cycle_graph(5))
    for x, y in itertools.product(range(3), range(5)):
        assert P.vid(x, y) == x * 5 + y and P.coords(x * 5 + y) == (x, y)
    assert Graph.loads(P.Z.dumps()) == P.Z


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=5), connected_graphs(max_n=5))
def test_distance_identity(X, Y):
    P = build_product(X, Y)
    D = P.Z.dist
    for (x1, y1), (x2, y2) in itertools.product(itertools.product(range(X.n), range(Y.n)), repeat=2):
        assert D[P.vid(x1, y1), P.vid(x2, y2)] == X.d(x1, x2) + Y.d(y1, y2)


def test_product_rejects_disconnected():
    with pytest.raises(GraphError):
        build_product(Graph(2), path_graph(2))


def test_degenerate_lemma():
    P = build_product(path_graph(3), path_graph(3))
    lp = lemma_paths(P, (1, 2), (1, 2))
    assert lp.gamma_a == lp.gamma_b == (P.vid(1, 2),) and lp.hausdorff_lower_bound == 0


def test_opposite_corners():
    P = build_product(path_graph(5), path_graph(5))
    lp = lemma_paths(P, (0, 0), (4, 4))
    assert len(lp.gamma_a) - 1 == 8
    # y3 = 4 coincides with y2, so the final descent is empty
    assert len(lp.gamma_b) - 1 == 8
    assert hausdorff_distance(P.Z, lp.gamma_a, lp.gamma_b) >= 4 == lp.hausdorff_lower_bound


def test_detour_example():
    P = build_product(path_graph(5), path_graph(5))
    lp = lemma_paths(P, (0, 0), (4, 0))
    assert P.vid(0, 4) in lp.gamma_b
    assert len(lp.gamma_b) - 1 == 12
    assert length_ratio_violation(P.Z, lp.gamma_b, 3) is None
    assert length_ratio_violation(P.Z, lp.gamma_b, 2) is not None
    assert hausdorff_distance(P.Z, lp.gamma_a, lp.gamma_b) >= 4


def test_swap_when_y_displacement_larger():
    P = build_product(path_graph(6), path_graph(6))
    lp = lemma_paths(P, (0, 0), (1, 5))
    assert lp.hausdorff_lower_bound == 5
    # the detour now runs along the first factor
    assert P.vid(5, 0) in lp.gamma_b
    with pytest.raises(GraphError, match="Y eccentricity too small"):
        lemma_paths(build_product(path_graph(3), path_graph(6)), (0, 0), (1, 5))
    with pytest.raises(GraphError, match="Y eccentricity too small"):
        lemma_paths(build_product(path_graph(6), path_graph(3)), (0, 0), (5, 0))


def pairs_strategy(max_n=5):
    @st.composite
    def build(draw):
        X = draw(connected_graphs(max_n=max_n))
        Y = draw(connected_graphs(max_n=max_n))
        z1 = (draw(st.integers(0, X.n - 1)), draw(st.integers(0, Y.n - 1)))
        z2 = (draw(st.integers(0, X.n - 1)), draw(st.integers(0, Y.n - 1)))
        return X, Y, z1, z2
    return build()


@settings(max_examples=80, deadline=None)
@given(pairs_strategy())
def test_lemma_certificates(case):
    X, Y, z1, z2 = case
    P = build_product(X, Y)
    try:
        lp = lemma_paths(P, z1, z2)
    except GraphError as e:
        assert "eccentricity" in str(e)
        return
    d = max(X.d(z1[0], z2[0]), Y.d(z1[1], z2[1]))
    g = P.Z
    a, b = lp.gamma_a, lp.gamma_b
    ends = (P.vid(*z1), P.vid(*z2))
    assert (a[0], a[-1]) == (b[0], b[-1]) == ends
    assert len(a) - 1 == X.d(z1[0], z2[0]) + Y.d(z1[1], z2[1])
    assert is_quasigeodesic(g, a, 1).ok
    assert is_quasigeodesic(g, b, 3).ok
    assert length_ratio_violation(g, b, 3) is None
    assert hausdorff_distance(g, a, b) >= d == lp.hausdorff_lower_bound


def test_witnesses_feed_stability_profile():
    for n in (4, 6, 8):
        P = build_product(path_graph(n), path_graph(n))
        lp = lemma_paths(P, (0, 0), (n - 1, 0))
        u, v = lp.gamma_a[0], lp.gamma_a[-1]
        prof = stability_profile(EmbeddedSubset(P.Z, (u, v)), 3, count_cap=5,
                                 seeds={(u, v): [lp.gamma_a, lp.gamma_b]})
        assert prof.R_observed >= n - 1
