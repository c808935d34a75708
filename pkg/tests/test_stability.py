import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from coarse_lab.hyperbolicity import thin_triangle_delta
from coarse_lab.metric_core import (
    Graph,
    GraphError,
    comb_tree,
    cycle_graph,
    grid_graph,
    hausdorff_distance,
    is_quasigeodesic,
    path_graph,
)
from coarse_lab.product import build_product, lemma_paths
from coarse_lab.stability import (
    EmbeddedSubset,
    distortion_profile,
    enumerate_quasigeodesics,
    max_pairwise_hausdorff,
    stability_profile,
    stability_trend,
    subdivide,
)
from coarse_lab.torus_mcg import SL2, ZERO, apply_mapping_class, farey_subgraph

from oracles import all_quasigeodesics, to_nx
from test_metric_core import connected_graphs, trees


def test_trivial_enumeration():
    qs = enumerate_quasigeodesics(path_graph(3), 1, 1, 1, 0)
    assert qs.paths == [(1,)] and not qs.overflow


def test_path_graph_enumeration_matches_oracle():
    g = path_graph(4)
    qs = enumerate_quasigeodesics(g, 0, 3, 1, 5)
    assert sorted(qs.paths) == all_quasigeodesics(g, 0, 3, 1, 5)
    assert len(qs.paths) == 5 and not qs.overflow
    geo = (0, 1, 2, 3)
    assert all(hausdorff_distance(g, p, geo) <= 1 for p in qs.paths)


def test_grid_enumeration_contains_corner_paths():
    g = grid_graph(4)
    qs = enumerate_quasigeodesics(g, 0, 15, 3, 12, count_cap=10_000)
    assert (0, 1, 2, 3, 7, 11, 15) in qs.paths
    assert (0, 4, 8, 12, 13, 14, 15) in qs.paths
    assert all(is_quasigeodesic(g, p, 3).ok for p in qs.paths[:500])


def test_length_cap_below_distance():
    with pytest.raises(GraphError):
        enumerate_quasigeodesics(path_graph(5), 0, 4, 2, 3)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=6), st.data())
def test_enumeration_is_exact_when_not_overflowing(g, data):
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    K = data.draw(st.sampled_from([1, Fraction(3, 2), 2]))
    cap = g.d(u, v) + data.draw(st.integers(0, 3))
    qs = enumerate_quasigeodesics(g, u, v, K, cap, count_cap=5000)
    assert not qs.overflow
    assert sorted(qs.paths) == all_quasigeodesics(g, u, v, K, cap)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=8), st.data())
def test_enumeration_sound_under_overflow(g, data):
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    qs = enumerate_quasigeodesics(g, u, v, 3, g.d(u, v) + 6, count_cap=50)
    assert len(qs.paths) == len(set(qs.paths)) <= 50
    for p in qs.paths:
        assert p[0] == u and p[-1] == v and len(p) - 1 <= g.d(u, v) + 6
        assert is_quasigeodesic(g, p, 3).ok


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=8), st.data())
def test_pool_divergence_matches_pairwise(g, data):
    paths = data.draw(st.lists(
        st.lists(st.integers(0, g.n - 1), min_size=1, max_size=5).map(tuple), min_size=1, max_size=6))
    div = max_pairwise_hausdorff(g, paths)
    brute = max(hausdorff_distance(g, a, b) for a, b in itertools.product(paths, repeat=2))
    assert div.radius == brute
    if div.witness:
        assert hausdorff_distance(g, *div.witness) == div.radius


def test_tree_segment_profile_constant_across_lengths():
    rs = []
    for length in (4, 6, 8):
        t = comb_tree(length, 3)
        prof = stability_profile(EmbeddedSubset(t, (0, length)), 2)
        rs.append(prof.R_observed)
    assert len(set(rs)) == 1


def test_grid_corners_diverge():
    for n in (4, 5, 6):
        prof = stability_profile(EmbeddedSubset(grid_graph(n), (0, n * n - 1)), 3)
        assert prof.R_observed >= n - 2
        a, b = prof.divergent_witness
        assert hausdorff_distance(grid_graph(n), a, b) == prof.R_observed


def test_product_witnesses_as_seeds():
    n = 6
    P = build_product(path_graph(n), path_graph(n))
    lp = lemma_paths(P, (0, 0), (n - 1, n - 1))
    u, v = lp.gamma_a[0], lp.gamma_a[-1]
    prof = stability_profile(EmbeddedSubset(P.Z, (u, v)), 3, count_cap=10,
                             seeds={(u, v): [lp.gamma_a, lp.gamma_b]})
    assert prof.R_observed >= n - 1
    with pytest.raises(GraphError):
        stability_profile(EmbeddedSubset(P.Z, (u, v)), 3, seeds={(u, v): [(u, u + 1)]})


def test_whole_tree_at_L1():
    t = comb_tree(3, 2)
    prof = stability_profile(EmbeddedSubset(t, tuple(range(t.n))), 1)
    assert prof.R_observed <= 2
    assert prof.endpoint_pairs_tested == t.n * (t.n - 1) // 2


@settings(max_examples=15, deadline=None)
@given(trees(max_n=9).filter(lambda t: t.n >= 2), st.data())
def test_profile_monotone_when_complete(t, data):
    ends = data.draw(st.lists(st.integers(0, t.n - 1), min_size=2, max_size=3, unique=True))
    S = EmbeddedSubset(t, tuple(ends))
    caps = [max(t.d(a, b) for a, b in itertools.combinations(ends, 2)) + k for k in (0, 2, 4)]
    grid = {}
    for L in (1, Fraction(3, 2), 2):
        for cap in caps:
            prof = stability_profile(S, L, cap, count_cap=200_000)
            if prof.lower_bound:
                return
            grid[L, cap] = prof.R_observed
    for (L1, c1), (L2, c2) in itertools.product(grid, repeat=2):
        if L1 <= L2 and c1 <= c2:
            assert grid[L1, c1] <= grid[L2, c2]


def test_trend_report():
    t = comb_tree(6, 3)
    trend = stability_trend(EmbeddedSubset(t, (0, 6)), 2, [10, 16, 24], count_cap=2000)
    assert trend["label"] == "bounded"
    g = grid_graph(6)
    trend = stability_trend(EmbeddedSubset(g, (0, 5)), 3, [5, 9, 13], count_cap=2000)
    assert trend["R"] == sorted(trend["R"])


def test_subdivide_examples():
    g, corr = subdivide(path_graph(4), 1)
    assert g == path_graph(4) and corr == [0, 1, 2, 3]
    g, corr = subdivide(path_graph(2), 3)
    assert nx.is_isomorphic(to_nx(g), to_nx(path_graph(4)))
    assert g.d(corr[0], corr[1]) == 3
    g, _ = subdivide(cycle_graph(4), 2)
    assert nx.is_isomorphic(to_nx(g), to_nx(cycle_graph(8)))


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=8), st.integers(1, 3))
def test_subdivide_scales_distances(g, k):
    h, corr = subdivide(g, k)
    for u, v in itertools.combinations(range(g.n), 2):
        assert h.d(corr[u], corr[v]) == k * g.d(u, v)


def test_distortion_examples():
    t = comb_tree(4, 2)
    assert distortion_profile(EmbeddedSubset(t, (0, 1, 2, 3))) == 1
    n = 5
    S = EmbeddedSubset(cycle_graph(2 * n), tuple(range(2 * n)), path_graph(2 * n))
    assert distortion_profile(S) == 2 * n - 1
    with pytest.raises(GraphError):
        distortion_profile(EmbeddedSubset(path_graph(3), (0, 2)))


def test_anosov_orbit_is_undistorted_in_farey_graph():
    A = SL2(2, 1, 1, 1)
    orbit = [ZERO]
    for _ in range(10):
        orbit.append(apply_mapping_class(A, orbit[-1]))
    g, verts = farey_subgraph(orbit)
    where = [verts.index(s) for s in orbit]
    ratio = distortion_profile(EmbeddedSubset(g, tuple(where), path_graph(len(orbit))))
    assert ratio <= 2


def test_stable_subsets_have_thin_intrinsic_graphs():
    """Corpus subsets whose profile stays put as the cap grows: their intrinsic
    graphs share one thinness bound (recorded here: trees give 0)."""
    deltas = []
    for spine, tooth in [(4, 2), (6, 3), (8, 2)]:
        t = comb_tree(spine, tooth)
        S = EmbeddedSubset(t, tuple(range(spine + 1)))
        rs = [stability_profile(EmbeddedSubset(t, (0, spine)), 2, cap, 3000).R_observed
              for cap in (2 * spine, 3 * spine)]
        if rs[0] == rs[1]:
            deltas.append(thin_triangle_delta(S.intrinsic).delta)
    assert deltas and max(deltas) == 0


def test_embedded_subset_validation():
    with pytest.raises(GraphError):
        EmbeddedSubset(path_graph(3), ())
    with pytest.raises(GraphError):
        EmbeddedSubset(path_graph(3), (0, 0))
    with pytest.raises(GraphError):
        EmbeddedSubset(path_graph(3), (0, 1), Graph(3))
    with pytest.raises(GraphError):
        stability_profile(EmbeddedSubset(path_graph(3), (0,)), 2)
