import itertools

from hypothesis import given, settings, strategies as st

from coarse_lab.hyperbolicity import (
    four_point_delta,
    nearest_point_projection,
    retraction_constants,
    thin_triangle_delta,
)
from coarse_lab.metric_core import (
    comb_tree,
    cycle_graph,
    first_geodesic,
    grid_graph,
    is_quasigeodesic,
    path_graph,
)
from coarse_lab.torus_mcg import ZERO, farey_ball_graph

from oracles import thin_delta_by_enumeration
from test_metric_core import connected_graphs, trees


def retraction_oracle(g, path):
    D = g.dist
    near = {x: [i for i in range(len(path)) if D[x, path[i]] == min(D[x, q] for q in path)]
            for x in range(g.n)}
    p = 1
    while True:
        ok = all(
            D[path[i], path[j]] <= p * D[x, y] + p
            for x, y in itertools.product(range(g.n), repeat=2)
            for i in near[x] for j in near[y]
        )
        if ok:
            return p
        p += 1


def test_tree_delta_zero():
    assert thin_triangle_delta(comb_tree(4, 2)).delta == 0
    assert thin_triangle_delta(path_graph(1)).delta == 0


def test_c4_delta_one_with_witness():
    rep = thin_triangle_delta(cycle_graph(4))
    assert rep.delta == 1 == thin_delta_by_enumeration(cycle_graph(4))
    g = cycle_graph(4)
    side, xy, yz = rep.sides
    x, y, z = rep.triangle
    assert (side[0], side[-1], xy[0], xy[-1], yz[0], yz[-1]) == (x, z, x, y, y, z)
    for s in rep.sides:
        assert is_quasigeodesic(g, s, 1).ok
    # the witness realises delta exactly
    far = rep.far_point
    assert far in side
    assert min(g.d(far, w) for w in set(xy) | set(yz)) == rep.delta


def test_farey_ball_is_thin():
    g, _ = farey_ball_graph(ZERO, 3, 4)
    assert g.is_connected()
    delta = thin_triangle_delta(g).delta
    assert delta <= 2
    assert delta == thin_delta_by_enumeration(g)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=7))
def test_delta_matches_exhaustive_enumeration(g):
    assert thin_triangle_delta(g).delta == thin_delta_by_enumeration(g)


@settings(max_examples=40, deadline=None)
@given(trees(max_n=16))
def test_trees_are_zero_hyperbolic(t):
    assert thin_triangle_delta(t).delta == 0
    assert four_point_delta(t) == 0


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=10))
def test_delta_bounded_by_diameter(g):
    rep = thin_triangle_delta(g)
    assert rep.delta <= g.diameter
    assert not rep.lower_bound


def test_four_point_cross_check():
    assert four_point_delta(cycle_graph(4)) == 1
    for g in (cycle_graph(6), grid_graph(4)):
        # positive together; four-point value never exceeds the thin-triangle value here
        assert 0 < four_point_delta(g) <= thin_triangle_delta(g).delta


def test_nearest_point_examples():
    c6 = cycle_graph(6)
    path = (0, 1, 2, 3)
    assert nearest_point_projection(c6, path, 2) == [2]
    assert nearest_point_projection(c6, path, 5) == [0]
    assert nearest_point_projection(c6, path, 4) == [3]


def test_retraction_examples():
    t = comb_tree(5, 2)
    assert retraction_constants(t, tuple(range(6))).p == 1
    rc = retraction_constants(cycle_graph(8), (0, 1, 2, 3))
    assert rc.p == retraction_oracle(cycle_graph(8), (0, 1, 2, 3)) == 2
    assert rc.witness is not None
    one = retraction_constants(grid_graph(3), (4,))
    assert (one.p, one.ambiguity) == (1, 0)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=9), st.data())
def test_retraction_matches_oracle(g, data):
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    path = first_geodesic(g, u, v)
    assert retraction_constants(g, path).p == retraction_oracle(g, path)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_n=11), st.data())
def test_geodesic_retraction_ambiguity_bound(g, data):
    """Empirical: nearest-point spread on a geodesic stays within 4 delta + 2."""
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    path = first_geodesic(g, u, v)
    delta = thin_triangle_delta(g).delta
    assert retraction_constants(g, path).ambiguity <= 4 * delta + 2
