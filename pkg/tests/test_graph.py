import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from layouttransfer.graph import (DanglingEndpointError, DuplicateNodeError,
                                  Graph, MalformedGraphError,
                                  NonFiniteCoordinateError, Structure,
                                  UnknownNodeError, connected_components,
                                  induced_subgraph, parse_graph,
                                  serialize_graph)

from conftest import path_graph, random_connected_graph


def test_parse_minimal_graph():
    g = parse_graph(b'{"nodes":[{"id":"a","x":0,"y":0}],"edges":[]}')
    assert g.node_ids == ("a",)
    assert g.edges == ()


def test_parse_dangling_endpoint():
    data = json.dumps({"nodes": [{"id": "a", "x": 0, "y": 0}],
                       "edges": [{"source": "a", "target": "z"}]})
    with pytest.raises(DanglingEndpointError):
        parse_graph(data)


def test_parse_duplicate_id():
    data = json.dumps({"nodes": [{"id": "a", "x": 0, "y": 0},
                                 {"id": "a", "x": 1, "y": 1}], "edges": []})
    with pytest.raises(DuplicateNodeError):
        parse_graph(data)


def test_parse_non_finite():
    with pytest.raises(NonFiniteCoordinateError):
        parse_graph('{"nodes":[{"id":"a","x":NaN,"y":0}],"edges":[]}')


def test_parse_malformed():
    with pytest.raises(MalformedGraphError):
        parse_graph(b"not json at all")


def test_path_round_trip():
    g = path_graph(5)
    assert len(g.edges) == 4
    data = serialize_graph(g)
    again = parse_graph(data)
    assert again.node_ids == g.node_ids
    assert again.edges == g.edges
    assert np.array_equal(again.positions, g.positions)
    assert serialize_graph(again) == data


def test_self_loops_and_duplicate_edges_collapsed():
    g = Graph.build([("a", 0, 0), ("b", 1, 0)],
                    [("a", "b"), ("b", "a"), ("a", "a")])
    assert g.edges == ((0, 1),)


def test_serialize_deterministic_over_random_graphs(rng):
    for _ in range(100):
        n = int(rng.integers(2, 15))
        g = random_connected_graph(n, 0.4, rng)
        data = serialize_graph(g)
        assert serialize_graph(parse_graph(data)) == data


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)),
                min_size=1, max_size=12))
def test_codec_round_trip_property(coords):
    nodes = [(f"n{i}", x, y) for i, (x, y) in enumerate(coords)]
    edges = [(f"n{i}", f"n{i + 1}") for i in range(len(coords) - 1)]
    g = Graph.build(nodes, edges)
    again = parse_graph(serialize_graph(g))
    assert again.node_ids == g.node_ids
    assert again.edges == g.edges
    assert np.array_equal(again.positions, g.positions)


def test_induced_subgraph_identity_and_partial():
    tri = Graph.build([("a", 0, 0), ("b", 1, 0), ("c", 0, 1)],
                      [("a", "b"), ("b", "c"), ("c", "a")])
    full = induced_subgraph(tri, Structure("g", ("a", "b", "c")))
    assert len(full.edges) == 3
    two = induced_subgraph(tri, Structure("g", ("a", "b")))
    assert two.node_ids == ("a", "b")
    assert len(two.edges) == 1
    assert np.array_equal(two.positions, tri.positions[:2])


def test_induced_subgraph_unknown_node():
    tri = Graph.build([("a", 0, 0)], [])
    with pytest.raises(UnknownNodeError):
        induced_subgraph(tri, Structure("g", ("a", "zz")))


def test_induced_subgraph_matches_brute_force(rng):
    g = random_connected_graph(20, 0.2, rng)
    subset = sorted(rng.choice(g.node_ids, 8, replace=False))
    sub = induced_subgraph(g, Structure("g", tuple(subset)))
    keep = set(subset)
    expected = sorted(tuple(sorted((a, b))) for a, b in g.edge_ids()
                      if a in keep and b in keep)
    got = sorted(tuple(sorted(e)) for e in sub.edge_ids())
    assert got == expected


def test_connected_components_basics():
    p5 = path_graph(5)
    assert connected_components(p5) == [{f"n{i}" for i in range(5)}]
    two_tris = Graph.build(
        [(x, 0, 0) for x in "abcdef"],
        [("a", "b"), ("b", "c"), ("c", "a"), ("d", "e"), ("e", "f"), ("f", "d")])
    comps = connected_components(two_tris)
    assert comps == [{"a", "b", "c"}, {"d", "e", "f"}]


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def test_connected_components_matches_union_find(rng):
    for _ in range(20):
        n = int(rng.integers(2, 25))
        edges = [(f"n{i}", f"n{j}") for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.08]
        g = Graph.build([(f"n{i}", 0, 0) for i in range(n)], edges)
        uf = _UnionFind(g.node_ids)
        for a, b in g.edge_ids():
            uf.union(a, b)
        expected = {}
        for nid in g.node_ids:
            expected.setdefault(uf.find(nid), set()).add(nid)
        got = connected_components(g)
        assert sorted(map(sorted, got)) == sorted(map(sorted, expected.values()))
        # partition: disjoint and covering
        union = set().union(*got)
        assert union == set(g.node_ids)
        assert sum(len(c) for c in got) == g.n
