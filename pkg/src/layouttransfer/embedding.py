"""Structural node embeddings via heat-kernel spectral graph wavelets, plus
k-nearest-neighbor queries over them.

Each node's embedding samples the empirical characteristic function of its heat
wavelet (column of U exp(-s L) U^T) at several scales. Nodes playing the same
structural role get (near-)identical vectors regardless of where they sit in
the graph, which is what makes embedding-space k-NN a substructure retriever.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, UnknownNodeError, connected_components, serialize_graph


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingConfig:
    scales: tuple[float, ...] = (0.5, 1.0)
    sample_count: int = 25
    sample_max: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        if not self.scales or any(s <= 0 for s in self.scales):
            raise EmbeddingError("scales must be non-empty and positive")
        if self.sample_count < 2:
            raise EmbeddingError("sample_count must be >= 2")
        if self.sample_max <= 0:
            raise EmbeddingError("sample_max must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.sample_count * len(self.scales)

    def sample_points(self) -> np.ndarray:
        # evenly spaced in (0, sample_max]
        return self.sample_max * np.arange(1, self.sample_count + 1) / self.sample_count


@dataclass(frozen=True)
class EmbeddingSet:
    node_ids: tuple[str, ...]
    vectors: np.ndarray  # (n, dim)
    _index: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        vec = np.asarray(self.vectors, dtype=float)
        if not np.all(np.isfinite(vec)):
            raise EmbeddingError("non-finite embedding entries")
        vec = vec.copy()
        vec.setflags(write=False)
        object.__setattr__(self, "vectors", vec)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.node_ids)})

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def vector_of(self, node_id: str) -> np.ndarray:
        try:
            return self.vectors[self._index[node_id]]
        except KeyError:
            raise UnknownNodeError(node_id) from None


def compute_embeddings(g: Graph, cfg: EmbeddingConfig | None = None) -> EmbeddingSet:
    """Heat-wavelet characteristic-function embeddings, computed per connected
    component with the unnormalized Laplacian L = D - A."""
    if cfg is None:
        cfg = EmbeddingConfig()
    if g.n == 0:
        raise EmbeddingError("empty graph")

    ts = cfg.sample_points()
    vectors = np.zeros((g.n, cfg.dim))
    for comp in connected_components(g):
        idx = sorted(g.index_of(nid) for nid in comp)
        m = len(idx)
        if m == 1:
            # psi = [1]: characteristic function is exp(i t) exactly
            row = np.concatenate([np.stack([np.cos(ts), np.sin(ts)], axis=1).ravel()
                                  for _ in cfg.scales])
            vectors[idx[0]] = row
            continue
        sub = {v: k for k, v in enumerate(idx)}
        lap = np.zeros((m, m))
        for a, b in g.edges:
            if a in sub and b in sub:
                ia, ib = sub[a], sub[b]
                lap[ia, ib] -= 1
                lap[ib, ia] -= 1
                lap[ia, ia] += 1
                lap[ib, ib] += 1
        evals, evecs = np.linalg.eigh(lap)
        if not np.all(np.isfinite(evals)):
            raise EmbeddingError("non-finite eigenvalue")
        blocks = []
        for s in cfg.scales:
            # wavelet matrix: column a is the heat signature of node a
            psi = (evecs * np.exp(-s * evals)) @ evecs.T  # (m, m), symmetric
            # empirical characteristic function over the component, per sample t
            phase = psi[:, :, None] * ts[None, None, :]  # (m_obs, m_node, t)
            re = np.cos(phase).mean(axis=0)  # (m_node, t)
            im = np.sin(phase).mean(axis=0)
            blocks.append(np.stack([re, im], axis=2).reshape(m, -1))
        comp_vec = np.concatenate(blocks, axis=1)
        for a in idx:
            vectors[a] = comp_vec[sub[a]]
    return EmbeddingSet(g.node_ids, vectors)


def knn_similar_nodes(emb: EmbeddingSet, query: set[str] | list[str], k: int) -> set[str]:
    """Union over query nodes of their k nearest nodes by Euclidean embedding
    distance (self included); ties broken by node id."""
    if k < 1:
        raise EmbeddingError("k must be >= 1")
    if k > len(emb.node_ids):
        raise EmbeddingError("k exceeds node count")
    result: set[str] = set()
    for q in sorted(query):
        qv = emb.vector_of(q)
        d = np.linalg.norm(emb.vectors - qv, axis=1)
        order = sorted(range(len(emb.node_ids)), key=lambda i: (d[i], emb.node_ids[i]))
        result.update(emb.node_ids[i] for i in order[:k])
    return result


# -- sidecar cache ---------------------------------------------------------

def graph_content_hash(g: Graph, cfg: EmbeddingConfig) -> str:
    h = hashlib.sha256()
    h.update(serialize_graph(g))
    h.update(json.dumps({"scales": list(cfg.scales), "sample_count": cfg.sample_count,
                         "sample_max": cfg.sample_max}, sort_keys=True).encode())
    return h.hexdigest()


def save_embedding_cache(path, g: Graph, cfg: EmbeddingConfig, emb: EmbeddingSet) -> None:
    payload = {
        "hash": graph_content_hash(g, cfg),
        "config": {"scales": list(cfg.scales), "sample_count": cfg.sample_count,
                   "sample_max": cfg.sample_max},
        "dim": emb.dim,
        "nodes": list(emb.node_ids),
        "vectors": [[float(x) for x in row] for row in emb.vectors],
    }
    with open(path, "w") as f:
        json.dump(payload, f)


def load_embedding_cache(path, g: Graph, cfg: EmbeddingConfig) -> EmbeddingSet | None:
    """Returns the cached set, or None on miss / graph-hash mismatch."""
    try:
        with open(path) as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("hash") != graph_content_hash(g, cfg):
        return None
    return EmbeddingSet(tuple(payload["nodes"]), np.array(payload["vectors"]))


def embeddings_with_cache(g: Graph, cfg: EmbeddingConfig, cache_path=None) -> EmbeddingSet:
    if cache_path is not None:
        cached = load_embedding_cache(cache_path, g, cfg)
        if cached is not None:
            return cached
    emb = compute_embeddings(g, cfg)
    if cache_path is not None:
        save_embedding_cache(cache_path, g, cfg, emb)
    return emb
