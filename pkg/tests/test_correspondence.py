import itertools

import numpy as np
import pytest

from layouttransfer.correspondence import (CorrespondenceSet, FilterParams,
                                           MarkerSet, MatchError,
                                           filter_correspondences,
                                           hungarian_assign,
                                           mean_adjacent_edge_length,
                                           parse_markers, seeded_auto_match,
                                           select_markers, serialize_markers)
from layouttransfer.graph import Graph

from conftest import (cycle_graph, path_graph, random_connected_graph,
                      relabeled_similarity_copy)


def brute_force_assign(costs):
    """Exhaustive minimum assignment for small tables; returns best total."""
    n, m = costs.shape
    best = np.inf
    if n <= m:
        for perm in itertools.permutations(range(m), n):
            total = sum(costs[i, perm[i]] for i in range(n))
            best = min(best, total)
    else:
        for perm in itertools.permutations(range(n), m):
            total = sum(costs[perm[j], j] for j in range(m))
            best = min(best, total)
    return best


def test_hungarian_matches_brute_force(rng):
    for _ in range(50):
        n = int(rng.integers(1, 8))
        m = int(rng.integers(1, 8))
        costs = rng.random((n, m)) * 10
        got = hungarian_assign(costs)
        total = sum(costs[r, c] for r, c in got)
        assert len(got) == min(n, m)
        assert abs(total - brute_force_assign(costs)) <= 1e-9


def test_hungarian_respects_forbidden_cells():
    costs = np.array([[1.0, np.inf], [np.inf, 1.0]])
    assert hungarian_assign(costs) == [(0, 0), (1, 1)]
    infeasible = np.array([[np.inf, np.inf], [1.0, np.inf]])
    with pytest.raises(MatchError):
        hungarian_assign(infeasible)
    assert hungarian_assign(infeasible, allow_partial=True) == [(1, 0)]


def test_hungarian_tie_break_deterministic():
    costs = np.ones((3, 3))
    assert hungarian_assign(costs) == [(0, 0), (1, 1), (2, 2)]
    assert hungarian_assign(np.zeros((2, 4))) == [(0, 0), (1, 1)]


def test_hungarian_rejects_bad_input():
    with pytest.raises(MatchError):
        hungarian_assign(np.zeros((0, 3)))
    with pytest.raises(MatchError):
        hungarian_assign(np.full((2, 2), np.inf))


def test_correspondence_injectivity():
    CorrespondenceSet((("a", "x"), ("b", "y")))
    with pytest.raises(MatchError):
        CorrespondenceSet((("a", "x"), ("a", "y")))
    with pytest.raises(MatchError):
        CorrespondenceSet((("a", "x"), ("b", "x")))


def test_marker_codec_round_trip():
    m = MarkerSet((("s1", "t3"), ("s2", "t0")))
    assert parse_markers(serialize_markers(m)).pairs == m.pairs


def test_mean_adjacent_edge_length():
    p3 = path_graph(3, spacing=2.0)
    assert mean_adjacent_edge_length(p3, 0) == pytest.approx(2.0)
    assert mean_adjacent_edge_length(p3, 1) == pytest.approx(2.0)
    iso = Graph.build([("a", 0, 0)], [])
    assert mean_adjacent_edge_length(iso, 0) == 0.0


def filter_oracle(s_graph, t_graph, pairs, r_u, r_d):
    """Line-by-line reimplementation of the keep/drop rule from scratch."""
    corr = dict(pairs)
    kept = []
    for cs, ct in pairs:
        si, ti = s_graph.index_of(cs), t_graph.index_of(ct)
        s_neigh = {s_graph.node_ids[b] if a == si else s_graph.node_ids[a]
                   for a, b in s_graph.edges if si in (a, b)}
        ns = {corr[u] for u in s_neigh if u in corr}
        nt = {t_graph.node_ids[b] if a == ti else t_graph.node_ids[a]
              for a, b in t_graph.edges if ti in (a, b)}
        nu = len(ns & nt)
        unique = nu > len(ns) * r_u or nu > len(nt) * r_u
        ds = mean_adjacent_edge_length(s_graph, si)
        dt = mean_adjacent_edge_length(t_graph, ti)
        d = float(np.linalg.norm(s_graph.positions[si] - t_graph.positions[ti]))
        close = d < ds * r_d and d < dt * r_d
        if unique and close:
            kept.append((cs, ct))
    return tuple(kept)


def test_filter_matches_oracle_on_random_pairs(rng):
    checked = 0
    while checked < 200:
        n = int(rng.integers(4, 12))
        s_graph = random_connected_graph(n, 0.35, rng, prefix="s")
        t_graph = random_connected_graph(n, 0.35, rng, prefix="t")
        perm = rng.permutation(n)
        pairs = tuple((f"s{i}", f"t{perm[i]}") for i in range(n))
        got = filter_correspondences(s_graph, t_graph, CorrespondenceSet(pairs),
                                     FilterParams()).pairs
        assert got == filter_oracle(s_graph, t_graph, pairs, 0.5, 2.0)
        checked += 1


def test_filter_keeps_perfect_overlay():
    g = cycle_graph(6, prefix="s")
    t = cycle_graph(6, prefix="t")
    pairs = tuple((f"s{i}", f"t{i}") for i in range(6))
    kept = filter_correspondences(g, t, CorrespondenceSet(pairs))
    assert kept.pairs == pairs


def test_filter_drops_distant_pair():
    s = path_graph(3, prefix="s")
    t = path_graph(3, prefix="t")
    far = t.with_positions(t.positions + [100.0, 0.0])
    pairs = CorrespondenceSet(tuple((f"s{i}", f"t{i}") for i in range(3)))
    assert filter_correspondences(s, far, pairs).pairs == ()


def test_filter_zero_degree_node_fails_distance_test():
    s = Graph.build([("s0", 0, 0), ("s1", 1, 0), ("s2", 5, 5)],
                    [("s0", "s1")])
    t = Graph.build([("t0", 0, 0), ("t1", 1, 0), ("t2", 5, 5)],
                    [("t0", "t1")])
    pairs = CorrespondenceSet((("s0", "t0"), ("s1", "t1"), ("s2", "t2")))
    kept = filter_correspondences(s, t, pairs)
    assert ("s2", "t2") not in kept.pairs


def test_seeded_auto_match_recovers_relabeled_copy(rng):
    hits = trials = 0
    for _ in range(10):
        s_graph = random_connected_graph(9, 0.3, rng, prefix="s")
        t_graph, truth = relabeled_similarity_copy(s_graph, rng)
        got = seeded_auto_match(s_graph, t_graph).as_dict()
        trials += len(truth)
        hits += sum(got.get(k) == v for k, v in truth.items())
    # embeddings ignore layout, so automorphic roles may swap; bulk must agree
    assert hits / trials >= 0.8


def test_seeded_auto_match_sizes_and_validation():
    s = path_graph(5, prefix="s")
    t = path_graph(3, prefix="t")
    c = seeded_auto_match(s, t)
    assert len(c.pairs) == 3
    with pytest.raises(MatchError):
        seeded_auto_match(Graph.build([], []), t)


def test_select_markers_aligned_copy(rng):
    s_graph = random_connected_graph(10, 0.3, rng, prefix="s")
    t_graph, truth = relabeled_similarity_copy(s_graph, rng, jitter_frac=0.0)
    c = CorrespondenceSet(tuple(truth.items()))
    markers, meta = select_markers(s_graph, t_graph, c)
    assert not meta["fallback"]
    assert set(markers.pairs) <= set(c.pairs)
    assert len(markers.pairs) == len(c.pairs)  # exact copy keeps everything
    assert meta["alignment_residual"] <= 1e-12


def test_select_markers_fallback_single_pair():
    s = path_graph(4, prefix="s")
    t = path_graph(4, prefix="t")
    # neither paired node has a mapped neighbor, so the common-neighbor test
    # rejects both pairs regardless of how well the alignment fits
    c = CorrespondenceSet((("s0", "t0"), ("s3", "t1")))
    markers, meta = select_markers(s, t, c)
    assert meta["fallback"]
    assert len(markers.pairs) == 1
