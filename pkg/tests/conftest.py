import numpy as np
import pytest

from layouttransfer.graph import Graph, is_connected


def random_connected_graph(n, p, rng, prefix="n", with_layout=True):
    """G(n, p) resampled until connected; positions random in a unit-ish box."""
    while True:
        edges = [(f"{prefix}{i}", f"{prefix}{j}")
                 for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        pos = rng.random((n, 2)) * 10 if with_layout else np.zeros((n, 2))
        g = Graph.build([(f"{prefix}{i}", pos[i][0], pos[i][1]) for i in range(n)], edges)
        if is_connected(g):
            return g


def path_graph(n, prefix="n", spacing=1.0):
    return Graph.build([(f"{prefix}{i}", i * spacing, 0.0) for i in range(n)],
                       [(f"{prefix}{i}", f"{prefix}{i + 1}") for i in range(n - 1)])


def cycle_graph(n, prefix="n", radius=1.0):
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return Graph.build(
        [(f"{prefix}{i}", radius * np.cos(ang[i]), radius * np.sin(ang[i]))
         for i in range(n)],
        [(f"{prefix}{i}", f"{prefix}{(i + 1) % n}") for i in range(n)])


def star_graph(leaves, prefix="n"):
    ang = np.linspace(0, 2 * np.pi, leaves, endpoint=False)
    nodes = [(f"{prefix}c", 0.0, 0.0)] + [
        (f"{prefix}{i}", np.cos(ang[i]), np.sin(ang[i])) for i in range(leaves)]
    return Graph.build(nodes, [(f"{prefix}c", f"{prefix}{i}") for i in range(leaves)])


# asymmetric 10-node motif (trivial automorphism group): 5-cycle with two
# pendant chains of different lengths
MOTIF_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
               (1, 5), (5, 6), (2, 7), (7, 8), (8, 9)]


def planted_motif_graph(copies=3, seed=0, noise=0):
    """Several exact copies of the motif joined in a ring through degree-4 hub
    bridge nodes, plus an optional background chain. Returns (graph, copy node
    lists)."""
    rng = np.random.default_rng(seed)
    nodes, edges, structs = [], [], []
    for c in range(copies):
        ids = [f"c{c}_{i}" for i in range(10)]
        for nid in ids:
            nodes.append((nid, c * 10.0 + rng.random() * 3, rng.random() * 3))
        for a, b in MOTIF_EDGES:
            edges.append((ids[a], ids[b]))
        structs.append(ids)
    for c in range(copies):
        nodes.append((f"b{c}", c * 10 + 5.0, 4.0))
        nodes.append((f"bp{c}a", c * 10 + 4.5, 5.0))
        nodes.append((f"bp{c}b", c * 10 + 5.5, 5.0))
        edges += [(f"c{c}_3", f"b{c}"), (f"b{c}", f"c{(c + 1) % copies}_6"),
                  (f"b{c}", f"bp{c}a"), (f"b{c}", f"bp{c}b")]
    prev = "bp0a"
    for i in range(noise):
        nodes.append((f"x{i}", rng.random() * 10 * copies, 6 + rng.random()))
        edges.append((prev, f"x{i}"))
        prev = f"x{i}"
    return Graph.build(nodes, edges), structs


def relabeled_similarity_copy(s_graph, rng, jitter_frac=0.01, translate=(5.0, -3.0)):
    """Target = relabeled, similarity-transformed, jittered copy of the source.
    Returns (target graph, ground-truth source-id -> target-id map)."""
    n = s_graph.n
    perm = rng.permutation(n)
    mapping = {s_graph.node_ids[i]: f"t{perm[i]}" for i in range(n)}
    theta = rng.random() * 2 * np.pi
    scale = 0.5 + rng.random() * 2
    rot = scale * np.array([[np.cos(theta), np.sin(theta)],
                            [-np.sin(theta), np.cos(theta)]])
    bbox = s_graph.bbox_diagonal()
    tpos = np.zeros((n, 2))
    for i in range(n):
        tpos[perm[i]] = (rot @ s_graph.positions[i] + np.asarray(translate)
                         + rng.normal(0, jitter_frac * bbox / 3, 2))
    t_edges = [(mapping[s_graph.node_ids[a]], mapping[s_graph.node_ids[b]])
               for a, b in s_graph.edges]
    t_graph = Graph.build([(f"t{i}", tpos[i][0], tpos[i][1]) for i in range(n)], t_edges)
    return t_graph, mapping


@pytest.fixture
def rng():
    return np.random.default_rng(42)
